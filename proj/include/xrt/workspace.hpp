#pragma once

#include "xrt/journal.hpp"
#include "xrt/project.hpp"

#include <filesystem>
#include <functional>

namespace xrt {

/// Exclusive advisory lock on `<root>/.xrt.lock`, held for the object's
/// lifetime. Throws ProjectLocked when another process holds it.
class ProjectLock {
public:
    explicit ProjectLock(const std::filesystem::path& root);
    ~ProjectLock();
    ProjectLock(const ProjectLock&) = delete;
    ProjectLock& operator=(const ProjectLock&) = delete;

private:
    int fd_ = -1;
};

/// A project directory: project.json, journal.log and the assets/ tree.
class Workspace {
public:
    /// Loads an existing project directory.
    static Workspace open(const std::filesystem::path& root);
    /// Writes `initial` as a new project.json. Fails with PathConflict when one exists.
    static Workspace create(const std::filesystem::path& root, Project initial);

    const std::filesystem::path& root() const noexcept { return root_; }
    std::filesystem::path project_file() const { return root_ / "project.json"; }
    std::filesystem::path journal_file() const { return root_ / "journal.log"; }

    Project& project() noexcept { return project_; }
    const Project& project() const noexcept { return project_; }
    Journal& journal() noexcept { return journal_; }
    const Journal& journal() const noexcept { return journal_; }

    ApplyContext context() const;
    void save() const;

    /// Replaces the default "can this file be deleted" check (tests use it
    /// to simulate files held open by another program).
    std::function<bool(const std::filesystem::path&)> can_remove;

private:
    std::filesystem::path root_;
    Project project_;
    Journal journal_;
};

}  // namespace xrt
