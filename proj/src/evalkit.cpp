#include "xrt/evalkit.hpp"

#include "xrt/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace xrt::eval {

std::string_view token(Task task) noexcept {
    switch (task) {
    case Task::Install: return "install";
    case Task::Transition: return "transition";
    case Task::Uninstall: return "uninstall";
    }
    return "?";
}

double savings_percent(double manual_seconds, double framework_seconds) {
    if (!(manual_seconds > 0)) {
        fail(ErrorCode::NonPositiveTime, "manual time must be positive, got " + std::to_string(manual_seconds));
    }
    long double raw = 100.0L * (static_cast<long double>(manual_seconds) - framework_seconds) / manual_seconds;
    // Values like 62.5 or 96.935 sit on the half-way point in decimal but not
    // necessarily in binary; the nudge makes half-up match exact decimal math.
    long double scaled = raw * 100.0L;
    long double nudge = 1e-9L * std::max(1.0L, std::fabs(scaled));
    long double rounded = std::floor(scaled + 0.5L + nudge) / 100.0L;
    return static_cast<double>(rounded);
}

SavingsReport report(const std::vector<TrialRecord>& trials, double framework_seconds) {
    if (trials.empty()) fail(ErrorCode::EmptyInput, "no trials to report on");
    SavingsReport rep;
    for (const auto& t : trials) rep.rows.push_back({t, savings_percent(static_cast<double>(t.manual_seconds), framework_seconds)});
    auto [lo, hi] = std::minmax_element(rep.rows.begin(), rep.rows.end(),
                                        [](const SavingsRow& a, const SavingsRow& b) { return a.percent < b.percent; });
    rep.min = lo->percent;
    rep.max = hi->percent;
    return rep;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

template <typename T>
bool parse_int(std::string_view text, T& out) {
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

std::vector<TrialRecord> parse_trials_csv(std::string_view text) {
    std::vector<TrialRecord> trials;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (!text.empty()) {
        auto nl = text.find('\n');
        auto line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (line.empty()) continue;
        auto where = "line " + std::to_string(line_no) + ": ";
        auto cells = split(line);
        if (!header_seen) {
            if (cells.size() != 3 || cells[0] != "participant" || cells[1] != "task" || cells[2] != "manual_seconds") {
                fail(ErrorCode::MalformedInput, where + "expected header participant,task,manual_seconds");
            }
            header_seen = true;
            continue;
        }
        if (cells.size() != 3) fail(ErrorCode::MalformedInput, where + "expected 3 fields");
        TrialRecord t;
        if (!parse_int(cells[0], t.participant) || t.participant < 1 || t.participant > 10) {
            fail(ErrorCode::MalformedInput, where + "participant must be an integer 1-10");
        }
        if (cells[1] == "install") {
            t.task = Task::Install;
        } else if (cells[1] == "transition") {
            t.task = Task::Transition;
        } else if (cells[1] == "uninstall") {
            t.task = Task::Uninstall;
        } else {
            fail(ErrorCode::MalformedInput, where + "unknown task '" + std::string(cells[1]) + "'");
        }
        if (!parse_int(cells[2], t.manual_seconds)) {
            fail(ErrorCode::MalformedInput, where + "manual_seconds must be an integer");
        }
        if (t.manual_seconds <= 0) fail(ErrorCode::NonPositiveTime, where + "manual_seconds must be positive");
        trials.push_back(t);
    }
    if (!header_seen) fail(ErrorCode::MalformedInput, "missing header participant,task,manual_seconds");
    return trials;
}

std::vector<TrialRecord> load_trials_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoFailure, "cannot read " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_trials_csv(buf.str());
}

std::string format_percent(double percent) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << percent;
    return os.str();
}

void write_table(std::ostream& out, const SavingsReport& rep, double framework_seconds) {
    for (auto task : {Task::Install, Task::Transition, Task::Uninstall}) {
        bool any = std::any_of(rep.rows.begin(), rep.rows.end(), [&](const SavingsRow& r) { return r.trial.task == task; });
        if (!any) continue;
        out << "Task: " << token(task) << " (framework " << framework_seconds << " s)\n";
        out << std::setw(12) << "participant" << std::setw(16) << "manual (s)" << std::setw(14) << "decrease %" << "\n";
        for (const auto& r : rep.rows) {
            if (r.trial.task != task) continue;
            out << std::setw(12) << r.trial.participant << std::setw(16) << r.trial.manual_seconds << std::setw(14)
                << format_percent(r.percent) << "\n";
        }
        out << "\n";
    }
    out << "min " << format_percent(rep.min) << "% max " << format_percent(rep.max) << "%\n";
}

void write_csv(std::ostream& out, const SavingsReport& rep) {
    out << "participant,task,manual_seconds,percent\n";
    for (const auto& r : rep.rows) {
        out << r.trial.participant << ',' << token(r.trial.task) << ',' << r.trial.manual_seconds << ','
            << format_percent(r.percent) << "\n";
    }
    out << "min,all,," << format_percent(rep.min) << "\n";
    out << "max,all,," << format_percent(rep.max) << "\n";
}

}  // namespace xrt::eval
