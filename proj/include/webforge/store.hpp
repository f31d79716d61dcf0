#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "webforge/jsonl.hpp"
#include "webforge/trajectory.hpp"

namespace webforge {

enum class StoreErrorKind {
    ClosedTrajectory,
    IndexGap,
    EmptyTrajectory,
    UnknownTrajectory,
    DuplicateTrajectory,
};

struct StoreError : std::runtime_error {
    StoreErrorKind kind;
    StoreError(StoreErrorKind k, const std::string& what_) : std::runtime_error(what_), kind(k) {}
};

// Append-only, file-backed trajectory store. One record stream per trajectory
// under <root>/trajectories/, content-addressed artifacts under
// <root>/artifacts/. Writers on distinct trajectory ids may run concurrently;
// a trajectory has exactly one writer.
class TrajectoryStore {
public:
    explicit TrajectoryStore(std::filesystem::path root) : root_(std::move(root)) {
        std::filesystem::create_directories(root_ / "trajectories");
        std::filesystem::create_directories(root_ / "artifacts");
    }

    const std::filesystem::path& root() const { return root_; }

    void open(const std::string& trajectory_id, const std::string& task_id,
              InstructionLevel level, const std::string& instruction, TrajectorySource source) {
        auto path = trajectory_path(trajectory_id);
        std::lock_guard<std::mutex> map_lock(map_mutex_);
        if (open_.count(trajectory_id) || std::filesystem::exists(path))
            throw StoreError(StoreErrorKind::DuplicateTrajectory,
                             "trajectory already exists: " + trajectory_id);
        auto state = std::make_shared<OpenState>();
        state->header.trajectory_id = trajectory_id;
        state->header.task_id = task_id;
        state->header.instruction_level = level;
        state->header.instruction = instruction;
        state->header.source = source;
        state->out.open(path, std::ios::trunc);
        if (!state->out) throw IoError("cannot open " + path.string());
        state->out << encode_header_line(state->header) << '\n';
        state->out.flush();
        open_[trajectory_id] = std::move(state);
    }

    void append_step(const std::string& trajectory_id, const StepRecord& step) {
        auto state = open_state(trajectory_id);
        std::lock_guard<std::mutex> lock(state->mutex);
        if (step.index != static_cast<int>(state->steps.size()))
            throw StoreError(StoreErrorKind::IndexGap,
                             "expected index " + std::to_string(state->steps.size()) + ", got " +
                                 std::to_string(step.index));
        state->out << encode_step_line(step) << '\n';
        state->out.flush();
        state->steps.push_back(step);
    }

    Trajectory finalize(const std::string& trajectory_id, Outcome outcome,
                        std::optional<std::string> final_message, const std::string& final_url,
                        const std::string& final_title) {
        std::shared_ptr<OpenState> state;
        {
            std::lock_guard<std::mutex> map_lock(map_mutex_);
            auto it = open_.find(trajectory_id);
            if (it == open_.end())
                throw StoreError(StoreErrorKind::ClosedTrajectory,
                                 "trajectory not open: " + trajectory_id);
            state = it->second;
            open_.erase(it);
        }
        std::lock_guard<std::mutex> lock(state->mutex);
        if (state->steps.empty()) {
            state->out.close();
            std::filesystem::remove(trajectory_path(trajectory_id));
            throw StoreError(StoreErrorKind::EmptyTrajectory,
                             "cannot finalize empty trajectory " + trajectory_id);
        }
        Trajectory t = state->header;
        t.steps = state->steps;
        t.outcome = outcome;
        t.final_message = std::move(final_message);
        t.final_url = final_url;
        t.final_title = final_title;
        state->out << encode_final_line(t) << '\n';
        state->out.flush();
        state->out.close();
        return t;
    }

    // Persists an already-assembled, finished trajectory wholesale.
    void record(const Trajectory& t) {
        if (t.steps.empty())
            throw StoreError(StoreErrorKind::EmptyTrajectory,
                             "cannot record empty trajectory " + t.trajectory_id);
        auto path = trajectory_path(t.trajectory_id);
        std::lock_guard<std::mutex> map_lock(map_mutex_);
        if (open_.count(t.trajectory_id) || std::filesystem::exists(path))
            throw StoreError(StoreErrorKind::DuplicateTrajectory,
                             "trajectory already exists: " + t.trajectory_id);
        write_file(path, canonical_encoding(t));
    }

    void attach_verdict(const std::string& trajectory_id, const Verdict& verdict) {
        auto path = trajectory_path(trajectory_id);
        std::lock_guard<std::mutex> map_lock(map_mutex_);
        if (open_.count(trajectory_id))
            throw StoreError(StoreErrorKind::ClosedTrajectory,
                             "cannot attach verdict to an open trajectory");
        if (!std::filesystem::exists(path))
            throw StoreError(StoreErrorKind::UnknownTrajectory, trajectory_id);
        std::ofstream out(path, std::ios::app);
        out << encode_verdict_line(verdict) << '\n';
    }

    Trajectory load(const std::string& trajectory_id) const {
        auto path = trajectory_path(trajectory_id);
        if (!std::filesystem::exists(path))
            throw StoreError(StoreErrorKind::UnknownTrajectory, trajectory_id);
        return decode(read_jsonl(path), trajectory_id);
    }

    bool exists(const std::string& trajectory_id) const {
        return std::filesystem::exists(trajectory_path(trajectory_id));
    }

    std::vector<std::string> list_ids() const {
        std::vector<std::string> ids;
        for (const auto& entry : std::filesystem::directory_iterator(root_ / "trajectories")) {
            if (!entry.is_regular_file()) continue;
            std::ifstream in(entry.path());
            std::string line;
            if (std::getline(in, line) && !line.empty()) {
                auto j = json::parse(line, nullptr, false);
                if (!j.is_discarded() && j.value("kind", "") == "header")
                    ids.push_back(j["trajectory_id"].get<std::string>());
            }
        }
        std::sort(ids.begin(), ids.end());
        return ids;
    }

    std::vector<Trajectory> load_all() const {
        std::vector<Trajectory> out;
        for (const auto& id : list_ids()) out.push_back(load(id));
        return out;
    }

    // ---- content-addressed artifacts ----

    std::string put_artifact(std::string_view bytes) {
        std::string ref = content_hash(bytes);
        auto path = root_ / "artifacts" / ref;
        if (!std::filesystem::exists(path)) write_file(path, bytes);
        return ref;
    }

    std::string get_artifact(const std::string& ref) const {
        return read_file(root_ / "artifacts" / ref);
    }

    bool has_artifact(const std::string& ref) const {
        return std::filesystem::exists(root_ / "artifacts" / ref);
    }

    std::filesystem::path trajectory_path(const std::string& trajectory_id) const {
        return root_ / "trajectories" / (fs_safe(trajectory_id) + ".jsonl");
    }

private:
    struct OpenState {
        Trajectory header; // id/task/instruction/source filled, steps empty
        std::vector<StepRecord> steps;
        std::ofstream out;
        std::mutex mutex;
    };

    std::shared_ptr<OpenState> open_state(const std::string& trajectory_id) {
        std::lock_guard<std::mutex> map_lock(map_mutex_);
        auto it = open_.find(trajectory_id);
        if (it == open_.end())
            throw StoreError(StoreErrorKind::ClosedTrajectory, "trajectory not open: " + trajectory_id);
        return it->second;
    }

    static std::string fs_safe(const std::string& id) {
        std::string out = id;
        for (char& c : out) {
            bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                      c == '.' || c == '_' || c == '-';
            if (!ok) c = '_';
        }
        return out;
    }

    static Trajectory decode(const std::vector<json>& records, const std::string& id) {
        Trajectory t;
        bool have_final = false;
        for (const auto& j : records) {
            const std::string kind = j.at("kind").get<std::string>();
            if (kind == "header") {
                t.trajectory_id = j.at("trajectory_id").get<std::string>();
                t.task_id = j.at("task_id").get<std::string>();
                t.instruction_level = instruction_level_from(j.at("instruction_level").get<std::string>());
                t.instruction = j.at("instruction").get<std::string>();
                t.source = trajectory_source_from(j.at("source").get<std::string>());
            } else if (kind == "step") {
                t.steps.push_back(step_from_json(j));
            } else if (kind == "final") {
                t.outcome = outcome_from(j.at("outcome").get<std::string>());
                if (j.contains("final_message"))
                    t.final_message = j["final_message"].get<std::string>();
                t.final_url = j.value("final_url", std::string());
                t.final_title = j.value("final_title", std::string());
                have_final = true;
            } else if (kind == "verdict") {
                t.verdicts.push_back(verdict_from_json(j));
            }
        }
        if (!have_final)
            throw StoreError(StoreErrorKind::ClosedTrajectory,
                             "trajectory not finalized: " + id);
        return t;
    }

    std::filesystem::path root_;
    mutable std::mutex map_mutex_;
    std::map<std::string, std::shared_ptr<OpenState>> open_;
};

} // namespace webforge
