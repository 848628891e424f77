package org.example.c21;

import java.text.SimpleDateFormat;
import java.util.Date;
import java.util.concurrent.ExecutorService;
import java.util.concurrent.Executors;

public class LogClock {
    private static final SimpleDateFormat FORMAT = new SimpleDateFormat("yyyy-MM-dd HH:mm");
    private final ExecutorService pool = Executors.newFixedThreadPool(4);

    public static String format(Date date) {
        return FORMAT.format(date);
    }

    public void stampAll(Iterable<Date> dates) {
        for (Date d : dates) {
            pool.submit(() -> System.out.println(format(d)));
        }
    }
}
