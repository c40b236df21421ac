#include "kupred/metrics/process.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <memory>
#include <sstream>

#include "kupred/util/error.hpp"

namespace kupred::metrics {

namespace {

std::string run_command(const std::string& cmd) {
    std::array<char, 4096> buf;
    std::string out;
    std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
    if (!pipe) throw Error("cannot run: " + cmd);
    size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe.get())) > 0)
        out.append(buf.data(), n);
    return out;
}

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') out += "'\\''";
        else out.push_back(c);
    }
    out += "'";
    return out;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

} // namespace

const std::vector<std::string>& process_metric_names() {
    static const std::vector<std::string> names = {
        "COMM", "ADDED_LINES", "DEL_LINES", "ADEV", "DDEV"};
    return names;
}

std::pair<std::string, std::string> parse_numstat_path(const std::string& field) {
    auto brace = field.find('{');
    if (brace != std::string::npos) {
        auto arrow = field.find(" => ", brace);
        auto close = field.find('}', brace);
        if (arrow != std::string::npos && close != std::string::npos &&
            arrow < close) {
            std::string prefix = field.substr(0, brace);
            std::string old_mid = field.substr(brace + 1, arrow - brace - 1);
            std::string new_mid = field.substr(arrow + 4, close - arrow - 4);
            std::string suffix = field.substr(close + 1);
            auto squash = [](std::string p) {
                // "{ => sub}" collapses an empty side to no segment
                std::string out;
                bool prev_slash = false;
                for (char c : p) {
                    if (c == '/' && (prev_slash || out.empty())) continue;
                    out.push_back(c);
                    prev_slash = c == '/';
                }
                return out;
            };
            return {squash(prefix + new_mid + suffix),
                    squash(prefix + old_mid + suffix)};
        }
    }
    auto arrow = field.find(" => ");
    if (arrow != std::string::npos)
        return {field.substr(arrow + 4), field.substr(0, arrow)};
    return {field, ""};
}

ProcessMetricVector compute_process_metrics(
    const std::vector<CommitRecord>& history,
    const std::set<std::string>& in_window, const std::string& path) {
    ProcessMetricVector out;
    std::string alias = path;  // name of the file at the point in history
    std::set<std::string> window_authors, all_authors;
    int64_t added = 0, deleted = 0;
    int64_t comm = 0;
    bool seen = false;

    for (const CommitRecord& c : history) {  // newest first
        for (const FileChange& ch : c.changes) {
            if (ch.path != alias) continue;
            seen = true;
            all_authors.insert(c.author_email);
            if (in_window.count(c.hash)) {
                ++comm;
                added += ch.added;
                deleted += ch.deleted;
                window_authors.insert(c.author_email);
            }
            if (!ch.old_path.empty()) alias = ch.old_path;
            break;
        }
    }

    if (!seen) {
        out.path_found = false;
        return out;
    }
    out.comm = static_cast<double>(comm);
    out.adev = static_cast<double>(window_authors.size());
    out.ddev = static_cast<double>(all_authors.size());
    out.added_lines = comm > 0 ? static_cast<double>(added) / comm : 0.0;
    out.del_lines = comm > 0 ? static_cast<double>(deleted) / comm : 0.0;
    return out;
}

GitHistory load_git_history(const std::string& repo_dir, const std::string& tag,
                            const std::string& prev_tag) {
    const std::string git = "git -C " + shell_quote(repo_dir) + " ";
    // verify tags up front so errors are actionable
    for (const std::string& t : {tag, prev_tag}) {
        if (t.empty()) continue;
        std::string check =
            run_command(git + "rev-parse --verify --quiet " + shell_quote(t) +
                        "^{commit} 2>/dev/null");
        if (check.empty()) throw Error("unknown tag: " + t);
    }

    GitHistory out;
    const std::string fmt = "--format=@%H%x09%ae%x09%at";
    std::string log = run_command(git + "log -M --numstat " + fmt + " " +
                                  shell_quote(tag) + " 2>/dev/null");
    CommitRecord cur;
    bool have = false;
    std::istringstream in(log);
    std::string line;
    auto flush = [&]() {
        if (have) out.commits.push_back(std::move(cur));
        cur = CommitRecord{};
    };
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] == '@') {
            flush();
            have = true;
            auto t1 = line.find('\t');
            auto t2 = line.find('\t', t1 + 1);
            cur.hash = line.substr(1, t1 - 1);
            cur.author_email = lower(line.substr(t1 + 1, t2 - t1 - 1));
            cur.timestamp = std::strtoll(line.c_str() + t2 + 1, nullptr, 10);
            continue;
        }
        if (line.empty()) continue;
        auto t1 = line.find('\t');
        auto t2 = line.find('\t', t1 + 1);
        if (t1 == std::string::npos || t2 == std::string::npos) continue;
        FileChange ch;
        std::string a = line.substr(0, t1);
        std::string d = line.substr(t1 + 1, t2 - t1 - 1);
        ch.added = a == "-" ? 0 : std::strtoll(a.c_str(), nullptr, 10);
        ch.deleted = d == "-" ? 0 : std::strtoll(d.c_str(), nullptr, 10);
        auto [np, op] = parse_numstat_path(line.substr(t2 + 1));
        ch.path = np;
        ch.old_path = op;
        cur.changes.push_back(std::move(ch));
    }
    flush();

    std::string range = prev_tag.empty()
                            ? shell_quote(tag)
                            : shell_quote(prev_tag) + ".." + shell_quote(tag);
    std::string revs = run_command(git + "rev-list " + range + " 2>/dev/null");
    std::istringstream rin(revs);
    while (std::getline(rin, line))
        if (!line.empty()) out.window.insert(line);
    return out;
}

} // namespace kupred::metrics
