package org.example.c19;

import java.util.Iterator;
import java.util.List;

public class FirstMatch {
    private final List<String> items;

    public FirstMatch(List<String> items) {
        this.items = items;
    }

    public String first() {
        Iterator<String> it = items.iterator();
        return it.next();
    }

    public int size() {
        return items.size();
    }
}
