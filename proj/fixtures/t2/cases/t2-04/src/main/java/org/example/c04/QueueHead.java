package org.example.c04;

import java.util.Iterator;
import java.util.List;

public class QueueHead {
    private final List<String> items;

    public QueueHead(List<String> items) {
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
