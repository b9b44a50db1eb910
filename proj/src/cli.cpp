#include "xrt/cli.hpp"

#include "xrt/evalkit.hpp"
#include "xrt/fetch.hpp"
#include "xrt/transition.hpp"
#include "xrt/workspace.hpp"

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <iomanip>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <unistd.h>

namespace fs = std::filesystem;

namespace xrt::cli {

int exit_code_for(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::NoConnection:
    case ErrorCode::NetworkFailure:
    case ErrorCode::NotFound:
    case ErrorCode::PortInUse:
        return kNetwork;
    case ErrorCode::ChecksumMismatch:
    case ErrorCode::CorruptArchive:
    case ErrorCode::ManifestMissing:
    case ErrorCode::HashMismatch:
    case ErrorCode::PathEscape:
    case ErrorCode::UnknownFormat:
        return kCorrupt;
    case ErrorCode::MalformedRegistry:
    case ErrorCode::MalformedProject:
    case ErrorCode::MalformedInput:
    case ErrorCode::IoFailure:
    case ErrorCode::NonPositiveTime:
    case ErrorCode::EmptyInput:
        return kMalformed;
    case ErrorCode::Cancelled:
        return kCancelled;
    default:
        return kPrecondition;
    }
}

namespace {

std::atomic<bool> g_interrupted{false};

extern "C" void on_sigint(int) { g_interrupted = true; }

class SigintScope {
public:
    SigintScope() {
        g_interrupted = false;
        struct sigaction sa {};
        sa.sa_handler = on_sigint;
        sigemptyset(&sa.sa_mask);
        sigaction(SIGINT, &sa, &previous_);
    }
    ~SigintScope() { sigaction(SIGINT, &previous_, nullptr); }

private:
    struct sigaction previous_ {};
};

struct Common {
    std::string project = ".";
    std::string registry;
    std::string staging;
    std::string format = "text";
};

std::string env_or(const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return v && *v ? std::string(v) : fallback;
}

Registry load_any_registry(const Common& c) {
    auto where = !c.registry.empty() ? c.registry
                                     : env_or("XRT_REGISTRY", (fs::path(c.project) / "registry.json").string());
    if (where.starts_with("http://") || where.starts_with("https://")) return parse_registry(fetch_text(where));
    return load_registry(where);
}

fs::path staging_dir(const Common& c) {
    if (!c.staging.empty()) return c.staging;
    return env_or("XRT_STAGING", (fs::path(c.project) / "staging").string());
}

std::string pick_scene(const Project& project, const std::string& requested) {
    if (!requested.empty()) return requested;
    if (project.scenes.size() == 1) return project.scenes.begin()->first;
    fail(ErrorCode::InvalidArgument, project.scenes.empty() ? "project has no scenes"
                                                            : "project has several scenes; pass --scene");
}

/// Terminal bar when stderr is a tty, otherwise one line per 10%.
class ProgressPrinter {
public:
    ProgressPrinter(std::ostream& err, std::string label)
        : err_(err), label_(std::move(label)), tty_(::isatty(STDERR_FILENO) == 1) {}

    void operator()(const Progress& p) {
        if (!p.fraction) return;
        int pct = static_cast<int>(*p.fraction * 100.0);
        if (tty_) {
            int filled = pct * 30 / 100;
            err_ << "\r" << label_ << " [" << std::string(filled, '#') << std::string(30 - filled, ' ') << "] "
                 << std::setw(3) << pct << "%" << std::flush;
            if (pct == 100 && !done_) {
                err_ << "\n";
                done_ = true;
            }
        } else if (pct / 10 > last_decile_) {
            last_decile_ = pct / 10;
            err_ << label_ << ": " << pct << "%\n";
        }
    }

private:
    std::ostream& err_;
    std::string label_;
    bool tty_;
    bool done_ = false;
    int last_decile_ = -1;
};

void csv_cell(std::ostream& out, const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        out << s;
        return;
    }
    out << '"';
    for (char ch : s) out << (ch == '"' ? "\"\"" : std::string(1, ch));
    out << '"';
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"xrt: move a 3D project between AR, VR and MR"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "xrt 1.0.0");
    bool yes = false;
    app.add_flag("--yes,-y", yes, "Assume yes (reserved; nothing prompts today)");

    Common c;
    auto add_project = [&](CLI::App* sub) {
        sub->add_option("--project,-p", c.project, "Project directory")->capture_default_str();
    };
    auto add_registry = [&](CLI::App* sub) {
        sub->add_option("--registry", c.registry, "Registry file or http(s) URL (default: $XRT_REGISTRY or <project>/registry.json)");
    };
    auto add_format = [&](CLI::App* sub) {
        sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"text", "csv"}))->capture_default_str();
    };

    auto* init = app.add_subcommand("init", "Create a project.json (sample scene with one camera)");
    add_project(init);
    bool empty_project = false;
    init->add_flag("--empty", empty_project, "Start with no scenes instead of the sample scene");

    auto* registry = app.add_subcommand("registry", "Inspect the SDK registry");
    registry->require_subcommand(1);
    auto* reg_list = registry->add_subcommand("list", "List SDKs and versions");
    std::string list_sdk;
    reg_list->add_option("--sdk", list_sdk, "Only this SDK");
    add_project(reg_list);
    add_registry(reg_list);
    add_format(reg_list);

    auto* sdk = app.add_subcommand("sdk", "Download and install SDKs");
    sdk->require_subcommand(1);
    auto* download = sdk->add_subcommand("download", "Download an SDK artifact into staging");
    std::string sdk_id;
    std::string version = "latest";
    bool install = false;
    std::string probe;
    download->add_option("id", sdk_id, "arcore | arkit | oculus | mrtk")->required();
    download->add_option("--version", version, "Exact version or 'latest'")->capture_default_str();
    download->add_flag("--install", install, "Install right after the download");
    download->add_option("--staging", c.staging, "Staging directory (default: $XRT_STAGING or <project>/staging)");
    download->add_option("--probe", probe, "Connectivity probe URL (default: the artifact's host)");
    add_project(download);
    add_registry(download);

    auto* sw = app.add_subcommand("switch", "Transition the project to another reality");
    std::string reality_tok;
    std::string camera;
    std::string scene;
    sw->add_option("reality", reality_tok, "ar-android | ar-ios | vr-oculus | mr-holo")->required();
    sw->add_option("--camera", camera, "Slash path of the camera node, e.g. Main/Camera")->required();
    sw->add_option("--scene", scene, "Scene name (default: the only scene)");
    add_project(sw);

    auto* uninstall = app.add_subcommand("uninstall", "Remove an SDK and revert everything done for it");
    uninstall->add_option("id", sdk_id, "arcore | arkit | oculus | mrtk")->required();
    add_project(uninstall);

    auto* spawn = app.add_subcommand("spawn-camera", "Add the installed SDK's camera rig to a scene");
    spawn->add_option("--scene", scene, "Scene name (default: the only scene)");
    add_project(spawn);

    auto* val = app.add_subcommand("validate", "List unmet requirements of a reality");
    val->add_option("reality", reality_tok, "ar-android | ar-ios | vr-oculus | mr-holo")->required();
    add_project(val);
    add_format(val);

    auto* ev = app.add_subcommand("eval", "Time-savings report from trial data");
    std::string csv_path;
    double framework_seconds = eval::kDefaultFrameworkSeconds;
    ev->add_option("csv", csv_path, "CSV with participant,task,manual_seconds")->required();
    ev->add_option("--framework-seconds", framework_seconds, "Time the tool needs per task")->capture_default_str();
    add_format(ev);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kOk : kPrecondition;
    }

    SigintScope sigint;
    try {
        if (*init) {
            Workspace::create(c.project, empty_project ? Project{} : make_sample_project());
            out << "created " << (fs::path(c.project) / "project.json").string() << "\n";
            return kOk;
        }

        if (*reg_list) {
            auto reg = load_any_registry(c);
            std::vector<SdkId> which;
            if (list_sdk.empty()) {
                which = reg.sdks();
            } else {
                which = {sdk_from_token(list_sdk)};
            }
            if (c.format == "csv") out << "sdk,version,format,size,sha256,url\n";
            for (auto id : which) {
                if (c.format != "csv") out << token(id) << " (" << display_name(id) << ")\n";
                for (const auto& v : reg.list_versions(id)) {
                    const auto& d = reg.resolve(id, v.str());
                    if (c.format == "csv") {
                        out << token(id) << ',' << v.str() << ',' << token(d.format) << ',' << d.size_bytes << ','
                            << d.sha256 << ',';
                        csv_cell(out, d.url);
                        out << "\n";
                    } else {
                        out << "  " << std::left << std::setw(10) << v.str() << std::setw(5) << token(d.format)
                            << std::right << std::setw(10) << d.size_bytes << " bytes  " << d.url << "\n";
                    }
                }
            }
            return kOk;
        }

        if (*download) {
            auto id = sdk_from_token(sdk_id);
            std::optional<ProjectLock> lock;
            std::optional<Workspace> ws;
            if (install) {
                lock.emplace(c.project);
                ws.emplace(Workspace::open(c.project));
            }
            auto reg = load_any_registry(c);
            const auto& desc = reg.resolve(id, version);
            InstallOptions opts;
            opts.staging_dir = staging_dir(c);
            if (!probe.empty()) opts.fetch.probe_url = probe;
            ProgressPrinter printer(err, std::string(token(id)) + " " + desc.version.str());
            opts.on_progress = [&](const Progress& p) { printer(p); };
            opts.should_cancel = [] { return g_interrupted.load(); };
            if (!install) {
                auto staged = download_artifact(desc, opts);
                out << staged.string() << "\n";
                return kOk;
            }
            auto tx = install_sdk(*ws, id, desc.version.str(), reg, opts);
            ws->save();
            out << "installed " << token(id) << " " << desc.version.str() << " (transaction " << tx << ")\n";
            return kOk;
        }

        if (*sw) {
            auto reality = reality_from_token(reality_tok);
            ProjectLock lock(c.project);
            auto ws = Workspace::open(c.project);
            auto plan = plan_transition(ws.project(), reality, pick_scene(ws.project(), scene), camera);
            auto tx = apply_transition(ws, plan);
            ws.save();
            out << "switched to " << token(reality) << " (transaction " << tx << ")\n";
            for (std::size_t i = 0; i < plan.steps.size(); ++i) {
                out << "  " << (i + 1) << ". " << kind(plan.steps[i].forward) << " "
                    << to_json(plan.steps[i].forward).dump() << "\n";
            }
            return kOk;
        }

        if (*uninstall) {
            auto id = sdk_from_token(sdk_id);
            ProjectLock lock(c.project);
            auto ws = Workspace::open(c.project);
            uninstall_sdk(ws, id);
            ws.save();
            out << "uninstalled " << token(id) << "\n";
            return kOk;
        }

        if (*spawn) {
            ProjectLock lock(c.project);
            auto ws = Workspace::open(c.project);
            auto path = spawn_reality_camera(ws, pick_scene(ws.project(), scene));
            ws.save();
            out << path << "\n";
            return kOk;
        }

        if (*val) {
            auto reality = reality_from_token(reality_tok);
            auto project = load_project(fs::path(c.project) / "project.json");
            auto violations = validate(project, reality);
            if (c.format == "csv") {
                out << "reality,violation\n";
                for (const auto& v : violations) {
                    out << token(reality) << ',';
                    csv_cell(out, v);
                    out << "\n";
                }
            } else if (violations.empty()) {
                out << token(reality) << ": all requirements met\n";
            } else {
                for (const auto& v : violations) out << v << "\n";
            }
            return violations.empty() ? kOk : kPrecondition;
        }

        if (*ev) {
            auto trials = eval::load_trials_csv(csv_path);
            auto rep = eval::report(trials, framework_seconds);
            if (c.format == "csv") {
                eval::write_csv(out, rep);
            } else {
                eval::write_table(out, rep, framework_seconds);
            }
            return kOk;
        }
    } catch (const Error& e) {
        err << "xrt: " << e.what() << "\n";
        if (e.code() == ErrorCode::NoConnection) err << "xrt: check your internet connection and retry\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "xrt: " << e.what() << "\n";
        return kMalformed;
    }
    return kPrecondition;
}

}  // namespace xrt::cli
