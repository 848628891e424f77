package org.example.c08;

import java.util.Locale;

public class SlugMaker {
    public String slug(String title) {
        String name = title.trim().toLowerCase(Locale.ROOT);
        name.replace(' ', '-');
        return name;
    }

    public String withExtension(String title, String ext) {
        return slug(title) + "." + ext;
    }
}
