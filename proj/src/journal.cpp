#include "xrt/journal.hpp"

#include "xrt/error.hpp"

#include <fstream>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace xrt {

std::string_view token(TxKind kind) noexcept {
    switch (kind) {
    case TxKind::Install: return "install";
    case TxKind::Transition: return "transition";
    case TxKind::SpawnCamera: return "spawn-camera";
    case TxKind::Other: return "other";
    }
    return "other";
}

json Transaction::to_json() const {
    json entries_json = json::array();
    for (const auto& e : entries) {
        entries_json.push_back(
            {{"kind", e.step_kind()}, {"forward", xrt::to_json(e.forward)}, {"inverse", xrt::to_json(e.inverse)}});
    }
    return {{"id", id},
            {"label", label},
            {"kind", token(kind)},
            {"sdk", sdk ? json(token(*sdk)) : json(nullptr)},
            {"entries", std::move(entries_json)},
            {"preSnapshotHash", pre_snapshot_hash},
            {"postSnapshotHash", post_snapshot_hash}};
}

Transaction Transaction::from_json(const json& doc) {
    try {
        Transaction tx;
        tx.id = doc.at("id").get<std::uint64_t>();
        tx.label = doc.at("label").get<std::string>();
        auto k = doc.at("kind").get<std::string>();
        tx.kind = k == "install"        ? TxKind::Install
                  : k == "transition"   ? TxKind::Transition
                  : k == "spawn-camera" ? TxKind::SpawnCamera
                                        : TxKind::Other;
        if (!doc.at("sdk").is_null()) tx.sdk = sdk_from_token(doc.at("sdk").get<std::string>());
        for (const auto& e : doc.at("entries")) {
            tx.entries.push_back({mutation_from_json(e.at("forward")), mutation_from_json(e.at("inverse"))});
        }
        tx.pre_snapshot_hash = doc.at("preSnapshotHash").get<std::string>();
        tx.post_snapshot_hash = doc.at("postSnapshotHash").get<std::string>();
        return tx;
    } catch (const json::exception& e) {
        fail(ErrorCode::MalformedInput, std::string("malformed journal transaction: ") + e.what());
    }
}

Journal Journal::open(const fs::path& log_file) {
    Journal j;
    j.path_ = log_file;
    std::ifstream in(log_file);
    if (!in) return j;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json record;
        try {
            record = json::parse(line);
        } catch (const json::exception& e) {
            fail(ErrorCode::MalformedInput,
                 log_file.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
        auto type = record.value("type", "");
        if (type == "commit") {
            auto tx = Transaction::from_json(record.at("tx"));
            j.next_id_ = std::max(j.next_id_, tx.id + 1);
            j.committed_.push_back(std::move(tx));
        } else if (type == "revert") {
            auto ids = record.at("ids").get<std::vector<std::uint64_t>>();
            std::erase_if(j.committed_, [&](const Transaction& tx) {
                return std::find(ids.begin(), ids.end(), tx.id) != ids.end();
            });
        } else {
            fail(ErrorCode::MalformedInput, log_file.string() + ":" + std::to_string(line_no) + ": unknown record");
        }
    }
    return j;
}

std::uint64_t Journal::begin(const Project& project, std::string label, TxKind kind, std::optional<SdkId> sdk) {
    if (open_) fail(ErrorCode::NestedTransaction, "transaction '" + open_->label + "' is still open");
    Transaction tx;
    tx.id = next_id_++;
    tx.label = std::move(label);
    tx.kind = kind;
    tx.sdk = sdk;
    tx.pre_snapshot_hash = snapshot_hash(project);
    open_ = std::move(tx);
    return open_->id;
}

const Transaction& Journal::current() const {
    if (!open_) fail(ErrorCode::NoOpenTransaction, "no open transaction");
    return *open_;
}

void Journal::record(JournalEntry entry) {
    if (!open_) fail(ErrorCode::NoOpenTransaction, "no open transaction");
    open_->entries.push_back(std::move(entry));
}

void Journal::apply(Project& project, const Mutation& m, const ApplyContext& ctx) {
    if (!open_) fail(ErrorCode::NoOpenTransaction, "no open transaction");
    auto inverse = apply_mutation(project, m, ctx);
    open_->entries.push_back({m, std::move(inverse)});
}

const Transaction& Journal::commit(const Project& project) {
    if (!open_) fail(ErrorCode::NoOpenTransaction, "no open transaction");
    open_->post_snapshot_hash = snapshot_hash(project);
    append_line({{"type", "commit"}, {"tx", open_->to_json()}});
    committed_.push_back(std::move(*open_));
    open_.reset();
    return committed_.back();
}

void revert_entries(Project& project, const Transaction& tx, const ApplyContext& ctx) {
    for (auto it = tx.entries.rbegin(); it != tx.entries.rend(); ++it) {
        try {
            apply_mutation(project, it->inverse, ctx);
        } catch (const Error& e) {
            fail(ErrorCode::RollbackFailure, "cannot revert " + std::string(it->step_kind()) + " of '" + tx.label +
                                                 "': " + e.what());
        }
    }
}

void Journal::rollback(Project& project, const ApplyContext& ctx) {
    if (!open_) fail(ErrorCode::NoOpenTransaction, "no open transaction");
    for (const auto& e : open_->entries) {
        if (auto locked = first_unremovable(e.inverse, ctx)) {
            fail(ErrorCode::RollbackFailure, "cannot remove " + *locked + " (file in use or read-only)");
        }
    }
    revert_entries(project, *open_, ctx);
    if (snapshot_hash(project) != open_->pre_snapshot_hash) {
        fail(ErrorCode::RollbackFailure, "rollback of '" + open_->label + "' did not restore the pre-snapshot");
    }
    open_.reset();
}

void Journal::rewrite(const std::vector<std::uint64_t>& reverted, std::vector<Transaction> replayed) {
    if (open_) fail(ErrorCode::NestedTransaction, "cannot rewrite history inside a transaction");
    append_line({{"type", "revert"}, {"ids", reverted}});
    std::erase_if(committed_, [&](const Transaction& tx) {
        return std::find(reverted.begin(), reverted.end(), tx.id) != reverted.end();
    });
    for (auto& tx : replayed) {
        tx.id = next_id_++;
        append_line({{"type", "commit"}, {"tx", tx.to_json()}});
        committed_.push_back(std::move(tx));
    }
}

void Journal::append_line(const json& record) {
    if (path_.empty()) return;
    int fd = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd < 0) fail(ErrorCode::IoFailure, "cannot open journal " + path_.string());
    struct FdGuard {
        int fd;
        ~FdGuard() { ::close(fd); }
    } guard{fd};
    if (::flock(fd, LOCK_EX) != 0) fail(ErrorCode::IoFailure, "cannot lock journal " + path_.string());
    auto line = record.dump() + "\n";
    std::size_t written = 0;
    while (written < line.size()) {
        auto n = ::write(fd, line.data() + written, line.size() - written);
        if (n < 0) {
            ::flock(fd, LOCK_UN);
            fail(ErrorCode::IoFailure, "cannot append to journal " + path_.string());
        }
        written += static_cast<std::size_t>(n);
    }
    ::fsync(fd);
    ::flock(fd, LOCK_UN);
}

bool verify_replay(const Transaction& tx, Project pre) {
    ApplyContext ctx;
    ctx.disk_effects = false;
    for (const auto& e : tx.entries) apply_mutation(pre, e.forward, ctx);
    return snapshot_hash(pre) == tx.post_snapshot_hash;
}

}  // namespace xrt
