package org.example.c01;

import java.io.FileInputStream;
import java.io.IOException;
import java.util.Properties;

/**
 * Loads key-value settings from a properties file on disk.
 */
public class SettingsLoader {
    private final String path;

    public SettingsLoader(String path) {
        this.path = path;
    }

    public Properties load() throws IOException {
        Properties props = new Properties();
        FileInputStream in = new FileInputStream(path);
        props.load(in);
        return props;
    }

    public String get(String key) throws IOException {
        return load().getProperty(key, "");
    }
}
