// Thin reset/step transport over the core environment. No numeric logic lives here.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "packbench/cli.hpp"
#include "packbench/dataset.hpp"
#include "packbench/env.hpp"
#include "packbench/policies.hpp"

namespace py = pybind11;
using namespace packbench;

namespace {

enum class Encoding { Raw, Pooled };

py::array_t<std::uint8_t> grid_array(const std::vector<std::uint8_t>& cells, const Dims& d) {
    py::array_t<std::uint8_t> a({d.x, d.y, d.z});
    std::copy(cells.begin(), cells.end(), a.mutable_data());
    return a;
}

py::array_t<double> pooled_array(const Dims& d, const std::vector<std::uint8_t>& cells, int cell) {
    const auto features = pooled_occupancy(d, cells, cell);
    py::array_t<double> a(static_cast<py::ssize_t>(features.size()));
    std::copy(features.begin(), features.end(), a.mutable_data());
    return a;
}

std::shared_ptr<const Task> load_task(const std::string& dataset, std::size_t index) {
    const auto ds = load_dataset(dataset);
    if (index >= ds.packs.size()) {
        throw py::index_error("task index " + std::to_string(index) + " out of range (dataset has " +
                              std::to_string(ds.packs.size()) + " tasks)");
    }
    return new_task(ds.packs[index]);
}

class Env {
public:
    Env(const std::string& dataset, std::size_t task_index, const std::string& mode, const std::string& encoding,
        int pool_cell)
        : task_(load_task(dataset, task_index)),
          mode_(parse_mode(mode)),
          encoding_(encoding == "raw"      ? Encoding::Raw
                    : encoding == "pooled" ? Encoding::Pooled
                                           : throw std::invalid_argument("encoding must be 'raw' or 'pooled'")),
          pool_cell_(pool_cell),
          episode_(task_, mode_) {}

    py::dict reset() {
        episode_ = Episode(task_, mode_);
        return observation();
    }

    py::tuple step(int action) {
        const StepResult r = episode_.step(action);
        return py::make_tuple(observation(), r.reward_value(), r.done, info());
    }

    [[nodiscard]] int action_count() const { return episode_.action_count(); }
    [[nodiscard]] bool done() const { return episode_.done(); }
    [[nodiscard]] std::string phase() const { return std::string(to_string(episode_.phase())); }
    [[nodiscard]] double cumulative_reward() const { return episode_.cumulative_reward().to_double(); }
    [[nodiscard]] std::string state() const { return episode_.serialize(); }
    [[nodiscard]] std::size_t shape_count() const { return task_->shapes.size(); }

    /// Greedy action of a named policy for the current observation.
    [[nodiscard]] int policy_action(const std::string& spec, std::uint64_t seed) const {
        return Policy::parse(spec, mode_, seed).choose(episode_.observe());
    }

private:
    py::object encode(const VoxelGrid& g) const {
        if (encoding_ == Encoding::Pooled) return pooled_array(g.dims(), g.cells(), pool_cell_);
        return grid_array(g.cells(), g.dims());
    }

    py::dict info() const {
        py::dict d;
        d["phase"] = phase();
        d["action_count"] = episode_.done() ? 0 : episode_.action_count();
        py::list anchors;
        for (const auto& a : episode_.candidates()) anchors.append(py::make_tuple(a.gx, a.gy, a.gz));
        d["candidates"] = anchors;
        d["feasible_rotations"] = episode_.feasible_rotations();
        return d;
    }

    py::dict observation() const {
        const Observation obs = episode_.observe();
        py::dict d;
        d["phase"] = std::string(to_string(obs.phase));
        d["step"] = obs.step;
        const auto box = obs.box.dense();
        if (encoding_ == Encoding::Raw) {
            d["box"] = grid_array(box, Dims{kVoxelsPerUnit, kVoxelsPerUnit, kVoxelsPerUnit});
        } else {
            d["box"] = pooled_array(Dims{kVoxelsPerUnit, kVoxelsPerUnit, kVoxelsPerUnit}, box, pool_cell_);
        }
        py::list shapes;
        for (const auto& g : obs.remaining_grids) shapes.append(encode(*g));
        d["shapes"] = shapes;
        d["remaining"] = obs.remaining;
        d["chosen"] = obs.chosen_grid ? encode(*obs.chosen_grid) : py::none();
        d["action_count"] = obs.action_count;
        return d;
    }

    std::shared_ptr<const Task> task_;
    Mode mode_;
    Encoding encoding_;
    int pool_cell_;
    Episode episode_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "packbench environment bindings";
    m.attr("__version__") = std::string(kToolVersion);

    py::register_exception<InvalidAction>(m, "InvalidAction", PyExc_IndexError);
    py::register_exception<EpisodeFinished>(m, "EpisodeFinished", PyExc_RuntimeError);

    py::class_<Env>(m, "Env")
        .def(py::init<const std::string&, std::size_t, const std::string&, const std::string&, int>(),
             py::arg("dataset"), py::arg("task_index"), py::arg("mode") = "vanilla", py::arg("encoding") = "raw",
             py::arg("pool_cell") = 4)
        .def("reset", &Env::reset)
        .def("step", &Env::step, py::arg("action"))
        .def("action_count", &Env::action_count)
        .def("policy_action", &Env::policy_action, py::arg("policy"), py::arg("seed") = 0)
        .def_property_readonly("done", &Env::done)
        .def_property_readonly("phase", &Env::phase)
        .def_property_readonly("cumulative_reward", &Env::cumulative_reward)
        .def_property_readonly("shape_count", &Env::shape_count)
        .def("state", &Env::state);

    m.def(
        "replay",
        [](const std::string& dataset, std::size_t task_index, const std::string& mode, const std::vector<int>& actions) {
            const auto t = replay_actions(load_task(dataset, task_index), parse_mode(mode), actions);
            py::list rewards, dones;
            for (const auto& s : t.steps) {
                rewards.append(s.reward.to_double());
                dones.append(s.done);
            }
            return py::make_tuple(rewards, dones);
        },
        py::arg("dataset"), py::arg("task_index"), py::arg("mode"), py::arg("actions"),
        "Core replay of an action list: (rewards, dones).");
}
