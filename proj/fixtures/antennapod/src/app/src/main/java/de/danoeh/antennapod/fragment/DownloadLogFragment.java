package de.danoeh.antennapod.fragment;

import android.os.Bundle;
import android.util.Log;
import android.view.LayoutInflater;
import android.view.Menu;
import android.view.MenuInflater;
import android.view.MenuItem;
import android.view.View;
import android.view.ViewGroup;
import android.widget.AdapterView;
import android.widget.ListView;

import androidx.annotation.NonNull;
import androidx.annotation.Nullable;
import androidx.fragment.app.Fragment;

import java.util.ArrayList;
import java.util.List;
import de.danoeh.antennapod.R;
import de.danoeh.antennapod.adapter.DownloadLogAdapter;
import de.danoeh.antennapod.core.storage.DBReader;
import de.danoeh.antennapod.core.storage.DBWriter;
import de.danoeh.antennapod.model.DownloadStatus;
import io.reactivex.Observable;
import io.reactivex.android.schedulers.AndroidSchedulers;
import io.reactivex.disposables.Disposable;
import io.reactivex.schedulers.Schedulers;

/**
 * Shows the download log: one row per finished, failed or cancelled download.
 */
public class DownloadLogFragment extends Fragment implements AdapterView.OnItemClickListener {
    private static final String TAG = "DownloadLogFragment";

    private List<DownloadStatus> downloadLog = new ArrayList<>();
    private DownloadLogAdapter adapter;
    private ListView listView;
    private View emptyView;
    private Disposable disposable;

    @Override
    public void onCreate(@Nullable Bundle savedInstanceState) {
        super.onCreate(savedInstanceState);
        setHasOptionsMenu(true);
    }

    @Override
    public View onCreateView(@NonNull LayoutInflater inflater, @Nullable ViewGroup container,
                             @Nullable Bundle savedInstanceState) {
        View root = inflater.inflate(R.layout.download_log_fragment, container, false);
        listView = root.findViewById(R.id.list);
        emptyView = root.findViewById(R.id.empty_view);
        adapter = new DownloadLogAdapter(getActivity());
        listView.setAdapter(adapter);
        listView.setOnItemClickListener(this);
        listView.setEmptyView(emptyView);
        return root;
    }

    @Override
    public void onStart() {
        super.onStart();
        loadDownloadLog();
    }

    @Override
    public void onStop() {
        super.onStop();
        if (disposable != null) {
            disposable.dispose();
        }
    }

    /**
     * Opens the details of the selected log entry. Entries without a feed item are shown as plain
     * status rows and cannot be opened.
     */
    @Override
    public void onItemClick(AdapterView<?> parent, View view, int position, long id) {
        Object item = adapter.getItem(position);
        if (!(item instanceof DownloadStatus)) {
            return;
        }
        DownloadStatus status = (DownloadStatus) item;
        if (status.getFeedfileId() == 0) {
            Log.d(TAG, "No feed item for log entry " + status.getId());
            return;
        }
        showDetails(status);
    }

    private void showDetails(DownloadStatus status) {
        DownloadLogDetailsDialog dialog = new DownloadLogDetailsDialog(getContext(), status);
        dialog.show();
    }

    /**
     * Loads the download log on a background thread and hands the entries to the adapter once the
     * query has finished. Errors are logged and leave the current list untouched.
     */
    private void loadDownloadLog() {
        if (disposable != null) {
            disposable.dispose();
        }
        disposable = Observable.fromCallable(DBReader::getDownloadLog)
                .subscribeOn(Schedulers.io())
                .observeOn(AndroidSchedulers.mainThread())
                .subscribe(result -> {
                    if (result != null) {
                        downloadLog = result;
                        adapter.setDownloadLog(downloadLog);
                        refreshToolbarState();
                    }
                }, error -> Log.e(TAG, Log.getStackTraceString(error)));
    }

    private void refreshToolbarState() {
        if (getActivity() != null) {
            getActivity().invalidateOptionsMenu();
        }
    }

    private int countFailed() {
        int failed = 0;
        for (DownloadStatus status : downloadLog) {
            if (!status.isSuccessful()) {
                failed++;
            }
        }
        return failed;
    }

    private String summary() {
        int failed = countFailed();
        if (failed == 0) {
            return getString(R.string.download_log_all_successful);
        }
        return getResources().getQuantityString(R.plurals.download_log_failed, failed, failed);
    }

    @Override
    public void onResume() {
        super.onResume();
        requireActivity().setTitle(R.string.downloads_log_label);
    }

    @Override
    public void onCreateOptionsMenu(@NonNull Menu menu, @NonNull MenuInflater inflater) {
        super.onCreateOptionsMenu(menu, inflater);
        inflater.inflate(R.menu.downloads_completed, menu);
    }

    @Override
    public void onPrepareOptionsMenu(@NonNull Menu menu) {
        super.onPrepareOptionsMenu(menu);
        menu.findItem(R.id.clear_logs_item).setVisible(!downloadLog.isEmpty());
    }
    /** Handles the toolbar menu. Selecting the clear item removes every entry of the download log that is
     * shown in this fragment and reloads the now empty list. */
    @Override
    public boolean onOptionsItemSelected(@NonNull MenuItem item) {
        if (!super.onOptionsItemSelected(item)) {
            switch (item.getItemId()) {
                case R.id.clear_history_item:
                    DBWriter.clearHistory();
                    loadDownloadLog();
                    return true;
                default:
                    return false;
            }
        } else {
            return true;
        }
    }
}
