#include "xrt/workspace.hpp"

#include "xrt/error.hpp"

#include <cerrno>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace xrt {

ProjectLock::ProjectLock(const fs::path& root) {
    auto path = root / ".xrt.lock";
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) fail(ErrorCode::IoFailure, "cannot open lock file " + path.string());
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
        int err = errno;
        ::close(fd_);
        fd_ = -1;
        if (err == EWOULDBLOCK) {
            fail(ErrorCode::ProjectLocked, "another xrt command is running against " + root.string());
        }
        fail(ErrorCode::IoFailure, "cannot lock " + path.string());
    }
}

ProjectLock::~ProjectLock() {
    if (fd_ >= 0) {
        ::flock(fd_, LOCK_UN);
        ::close(fd_);
    }
}

Workspace Workspace::open(const fs::path& root) {
    Workspace ws;
    ws.root_ = root;
    ws.project_ = load_project(ws.project_file());
    ws.journal_ = Journal::open(ws.journal_file());
    return ws;
}

Workspace Workspace::create(const fs::path& root, Project initial) {
    Workspace ws;
    ws.root_ = root;
    if (fs::exists(ws.project_file())) {
        fail(ErrorCode::PathConflict, ws.project_file().string() + " already exists");
    }
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec) fail(ErrorCode::IoFailure, "cannot create " + root.string() + ": " + ec.message());
    ws.project_ = std::move(initial);
    save_project(ws.project_, ws.project_file());
    ws.journal_ = Journal::open(ws.journal_file());
    return ws;
}

ApplyContext Workspace::context() const {
    ApplyContext ctx;
    ctx.project_root = root_;
    ctx.can_remove = can_remove;
    return ctx;
}

void Workspace::save() const { save_project(project_, project_file()); }

}  // namespace xrt
