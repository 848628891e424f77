package org.example.c05;

import java.util.ArrayList;
import java.util.List;

public class NameFilter {
    private final List<String> names = new ArrayList<>();

    public void add(String name) {
        names.add(name);
    }

    public List<String> dropEmpty() {
        for (String name : names) {
            if (name.isEmpty()) {
                names.remove(name);
            }
        }
        return names;
    }
}
