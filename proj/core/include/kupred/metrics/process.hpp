#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace kupred::metrics {

struct FileChange {
    std::string path;      // path after this commit
    std::string old_path;  // pre-rename path, empty when not renamed
    int64_t added = 0;
    int64_t deleted = 0;
};

struct CommitRecord {
    std::string hash;
    std::string author_email;  // lowercased; the developer identity
    int64_t timestamp = 0;
    std::vector<FileChange> changes;
};

struct ProcessMetricVector {
    double comm = 0;         // commits in window touching the file
    double added_lines = 0;  // added lines in window / COMM
    double del_lines = 0;    // deleted lines in window / COMM
    double adev = 0;         // distinct window authors
    double ddev = 0;         // distinct authors over all history
    bool path_found = true;  // false: path never appears in history

    bool operator==(const ProcessMetricVector&) const = default;
};

const std::vector<std::string>& process_metric_names();  // COMM..DDEV

// Pure over the given records. `history` must be ordered newest commit
// first (renames are followed backwards); `in_window` holds the hashes of
// commits in (prev_tag, release_tag].
ProcessMetricVector compute_process_metrics(
    const std::vector<CommitRecord>& history,
    const std::set<std::string>& in_window, const std::string& path);

// git plumbing: reads history up to `tag` plus the (prev, tag] window from
// a local clone. Throws Error on unknown tags or git failures.
struct GitHistory {
    std::vector<CommitRecord> commits;  // newest first
    std::set<std::string> window;
};
GitHistory load_git_history(const std::string& repo_dir, const std::string& tag,
                            const std::string& prev_tag);

// numstat path field, handling "{old => new}" rename syntax. Returns
// (new_path, old_path); old_path empty for plain entries.
std::pair<std::string, std::string> parse_numstat_path(const std::string& field);

} // namespace kupred::metrics
