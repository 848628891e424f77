package org.example.c23;

import java.util.Locale;

public class FileNamer {
    public String slug(String title) {
        String name = title.trim().toLowerCase(Locale.ROOT);
        name.replace(' ', '-');
        return name;
    }

    public String withExtension(String title, String ext) {
        return slug(title) + "." + ext;
    }
}
