package de.danoeh.antennapod.core.storage;

import android.util.Log;

import java.util.concurrent.ExecutorService;
import java.util.concurrent.Executors;
import java.util.concurrent.Future;

/**
 * Serializes all write access to the podcast database on a single background thread.
 */
public class DBWriter {
    private static final String TAG = "DBWriter";

    private static final ExecutorService dbExec = Executors.newSingleThreadExecutor(r -> {
        Thread t = new Thread(r, "DatabaseExecutor");
        t.setPriority(Thread.MIN_PRIORITY);
        return t;
    });

    private DBWriter() {
    }

    /**
     * Removes all entries from the download log. Finished downloads stay on disk; only the log rows
     * that describe past download attempts are deleted.
     */
    public static Future<?> clearDownloadLog() {
        return dbExec.submit(() -> {
            PodDBAdapter adapter = PodDBAdapter.getInstance();
            adapter.open();
            adapter.clearDownloadLog();
            adapter.close();
            Log.d(TAG, "Download log cleared");
        });
    }

    /**
     * Deletes the playback history: every item loses its last-played timestamp so that the history
     * screen becomes empty. The download log is not touched.
     */
    public static Future<?> clearHistory() {
        return dbExec.submit(() -> {
            PodDBAdapter adapter = PodDBAdapter.getInstance();
            adapter.open();
            adapter.clearPlaybackHistory();
            adapter.close();
            Log.d(TAG, "Playback history cleared");
        });
    }

    /**
     * Adds a single status row to the download log. Callers pass the outcome of a finished, failed or
     * cancelled download; the row is written asynchronously.
     */
    public static Future<?> addDownloadStatus(final DownloadStatus status) {
        return dbExec.submit(() -> {
            PodDBAdapter adapter = PodDBAdapter.getInstance();
            adapter.open();
            adapter.setDownloadStatus(status);
            adapter.close();
        });
    }
}
