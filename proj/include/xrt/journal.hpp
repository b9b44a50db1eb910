#pragma once

#include "xrt/mutation.hpp"
#include "xrt/project.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace xrt {

/// What a transaction did; uninstall uses this together with the SDK tag.
enum class TxKind { Install, Transition, SpawnCamera, Other };

std::string_view token(TxKind kind) noexcept;

struct JournalEntry {
    Mutation forward;
    Mutation inverse;

    std::string_view step_kind() const noexcept { return kind(forward); }
};

struct Transaction {
    std::uint64_t id = 0;
    std::string label;
    TxKind kind = TxKind::Other;
    std::optional<SdkId> sdk;
    std::vector<JournalEntry> entries;
    std::string pre_snapshot_hash;
    std::string post_snapshot_hash;

    nlohmann::json to_json() const;
    static Transaction from_json(const nlohmann::json& doc);
};

/// Ordered log of committed transactions plus at most one open one. When
/// backed by a file, every commit and revert is appended to it as one line
/// of canonical JSON under an exclusive lock.
class Journal {
public:
    /// In-memory journal (nothing persisted).
    Journal() = default;
    /// Loads `log_file` if it exists; later commits append to it.
    static Journal open(const std::filesystem::path& log_file);

    /// Starts a transaction; throws NestedTransaction if one is open.
    std::uint64_t begin(const Project& project, std::string label, TxKind kind = TxKind::Other,
                        std::optional<SdkId> sdk = std::nullopt);
    /// Appends an already-applied entry to the open transaction.
    void record(JournalEntry entry);
    /// Applies `m` to the project and records it with its captured inverse.
    void apply(Project& project, const Mutation& m, const ApplyContext& ctx);
    /// Closes the open transaction and persists it.
    const Transaction& commit(const Project& project);
    /// Undoes the open transaction in reverse order. Removability of files is
    /// checked before anything is touched; the result must hash to the
    /// pre-snapshot. Throws RollbackFailure otherwise.
    void rollback(Project& project, const ApplyContext& ctx);

    bool in_transaction() const noexcept { return open_.has_value(); }
    const Transaction& current() const;
    /// Committed transactions that have not been reverted, oldest first.
    const std::vector<Transaction>& transactions() const noexcept { return committed_; }
    const std::filesystem::path& path() const noexcept { return path_; }

    /// Rewrites history after an uninstall: drops `reverted` ids and appends
    /// `replayed` (which receive fresh ids). Persists one revert record
    /// followed by one commit record per replayed transaction.
    void rewrite(const std::vector<std::uint64_t>& reverted, std::vector<Transaction> replayed);

private:
    void append_line(const nlohmann::json& record);

    std::filesystem::path path_;
    std::vector<Transaction> committed_;
    std::optional<Transaction> open_;
    std::uint64_t next_id_ = 1;
};

/// Applies the inverses of `tx` in reverse order. No hash check.
void revert_entries(Project& project, const Transaction& tx, const ApplyContext& ctx);

/// Re-applies `tx`'s forward mutations, model-only, to a copy of `pre` and
/// reports whether the result hashes to tx.post_snapshot_hash.
bool verify_replay(const Transaction& tx, Project pre);

}  // namespace xrt
