#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace xrt::eval {

enum class Task { Install, Transition, Uninstall };

std::string_view token(Task task) noexcept;

struct TrialRecord {
    int participant = 0;
    Task task{};
    std::int64_t manual_seconds = 0;
};

struct SavingsRow {
    TrialRecord trial;
    double percent = 0;
};

struct SavingsReport {
    std::vector<SavingsRow> rows;
    double min = 0;
    double max = 0;
};

inline constexpr double kDefaultFrameworkSeconds = 15.0;

/// 100 * (manual - framework) / manual, rounded half-up to two decimals.
/// Throws NonPositiveTime when manual_seconds <= 0.
double savings_percent(double manual_seconds, double framework_seconds = kDefaultFrameworkSeconds);

/// Throws EmptyInput for no trials.
SavingsReport report(const std::vector<TrialRecord>& trials, double framework_seconds = kDefaultFrameworkSeconds);

/// Header `participant,task,manual_seconds`. Throws MalformedInput with the
/// offending line number, NonPositiveTime for times <= 0.
std::vector<TrialRecord> parse_trials_csv(std::string_view text);
std::vector<TrialRecord> load_trials_csv(const std::string& path);

/// Two-decimal fixed formatting ("62.50").
std::string format_percent(double percent);

/// One block per task, mirroring the three tables, then a summary line.
void write_table(std::ostream& out, const SavingsReport& rep, double framework_seconds);
void write_csv(std::ostream& out, const SavingsReport& rep);

}  // namespace xrt::eval
