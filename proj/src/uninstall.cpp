#include "xrt/error.hpp"
#include "xrt/transition.hpp"

#include <algorithm>

namespace xrt {

namespace m = mutation;

namespace {

bool places_files(const Transaction& tx) {
    return std::any_of(tx.entries.begin(), tx.entries.end(),
                       [](const JournalEntry& e) { return std::holds_alternative<m::PlaceFiles>(e.forward); });
}

bool under(const std::string& file, const std::string& dir) {
    return file.size() > dir.size() && file.compare(0, dir.size(), dir) == 0 && file[dir.size()] == '/';
}

/// Directories the removed SDK created that still hold another install's
/// files would outlive every uninstall; hand them to the first such install.
void adopt_shared_dirs(const std::vector<std::string>& removed_dirs, std::vector<Transaction>& kept) {
    std::set<std::string> adopted;
    for (auto& tx : kept) {
        if (tx.kind != TxKind::Install) continue;
        for (auto& entry : tx.entries) {
            auto* place = std::get_if<m::PlaceFiles>(&entry.forward);
            if (!place) continue;
            std::vector<std::string> take;
            for (const auto& dir : removed_dirs) {
                if (adopted.contains(dir)) continue;
                bool used = std::any_of(place->report.created_files.begin(), place->report.created_files.end(),
                                        [&](const std::string& f) { return under(f, dir); });
                if (used) take.push_back(dir);
            }
            if (take.empty()) continue;
            adopted.insert(take.begin(), take.end());
            auto patch = [&](ExtractionReport& report) {
                auto dirs = take;
                for (const auto& d : report.created_dirs) {
                    if (std::find(dirs.begin(), dirs.end(), d) == dirs.end()) dirs.push_back(d);
                }
                report.created_dirs = std::move(dirs);
            };
            patch(place->report);
            for (auto& other : tx.entries) {
                if (auto* reg = std::get_if<m::RegisterSdk>(&other.forward)) patch(reg->record.files);
            }
        }
    }
}

}  // namespace

void uninstall_sdk(Workspace& ws, SdkId sdk) {
    auto& project = ws.project();
    auto& journal = ws.journal();
    if (!project.installed_sdks.contains(sdk)) {
        fail(ErrorCode::NotInstalled, std::string(display_name(sdk)) + " is not installed");
    }
    if (journal.in_transaction()) fail(ErrorCode::NestedTransaction, "a transaction is already open");

    const auto& history = journal.transactions();
    auto install = std::find_if(history.rbegin(), history.rend(), [&](const Transaction& tx) {
        return tx.kind == TxKind::Install && tx.sdk == sdk;
    });
    if (install == history.rend()) {
        fail(ErrorCode::RollbackFailure, "journal has no install record for " + std::string(token(sdk)));
    }
    std::vector<Transaction> later(std::prev(install.base()), history.end());

    std::vector<Transaction> reverted_sdk;
    std::vector<Transaction> kept;
    for (const auto& tx : later) (tx.sdk == sdk ? reverted_sdk : kept).push_back(tx);

    auto ctx = ws.context();
    for (const auto& tx : reverted_sdk) {
        for (const auto& e : tx.entries) {
            if (auto locked = first_unremovable(e.inverse, ctx)) {
                fail(ErrorCode::RollbackFailure, "cannot remove " + *locked + " (file in use or read-only)");
            }
        }
    }

    // Everything below works on a copy; the real project and the disk are
    // only touched once the whole plan is known to succeed.
    ApplyContext model_ctx;
    model_ctx.disk_effects = false;
    Project model = project;
    for (auto it = later.rbegin(); it != later.rend(); ++it) revert_entries(model, *it, model_ctx);
    if (snapshot_hash(model) != later.front().pre_snapshot_hash) {
        fail(ErrorCode::RollbackFailure,
             "reverting '" + later.front().label + "' did not restore the pre-install state");
    }

    std::vector<std::string> removed_dirs;
    for (const auto& tx : reverted_sdk) {
        for (const auto& e : tx.entries) {
            if (auto* place = std::get_if<m::PlaceFiles>(&e.forward)) {
                removed_dirs.insert(removed_dirs.end(), place->report.created_dirs.begin(),
                                    place->report.created_dirs.end());
            }
        }
    }
    adopt_shared_dirs(removed_dirs, kept);

    std::vector<Transaction> replayed;
    for (const auto& tx : kept) {
        Project attempt = model;
        Transaction fresh;
        fresh.label = tx.label;
        fresh.kind = tx.kind;
        fresh.sdk = tx.sdk;
        fresh.pre_snapshot_hash = snapshot_hash(attempt);
        try {
            for (const auto& e : tx.entries) {
                auto inverse = apply_mutation(attempt, e.forward, model_ctx);
                fresh.entries.push_back({e.forward, std::move(inverse)});
            }
        } catch (const Error& e) {
            if (places_files(tx)) {
                fail(ErrorCode::RollbackFailure,
                     "cannot keep '" + tx.label + "' after removing " + std::string(token(sdk)) + ": " + e.what());
            }
            continue;  // e.g. a switch aimed at a camera that no longer exists
        }
        fresh.post_snapshot_hash = snapshot_hash(attempt);
        model = std::move(attempt);
        replayed.push_back(std::move(fresh));
    }

    for (auto it = reverted_sdk.rbegin(); it != reverted_sdk.rend(); ++it) {
        for (auto e = it->entries.rbegin(); e != it->entries.rend(); ++e) {
            if (auto* remove = std::get_if<m::RemoveFiles>(&e->inverse)) remove_extracted(ws.root(), remove->report);
        }
    }

    std::vector<std::uint64_t> ids;
    for (const auto& tx : later) ids.push_back(tx.id);
    journal.rewrite(ids, std::move(replayed));
    model.revision = project.revision + 1;
    project = std::move(model);
}

}  // namespace xrt
