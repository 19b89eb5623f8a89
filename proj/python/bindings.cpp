#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "fieldrank/baselines.hpp"
#include "fieldrank/glrm.hpp"
#include "fieldrank/grid.hpp"
#include "fieldrank/planner.hpp"
#include "fieldrank/sim.hpp"

namespace py = pybind11;
using namespace fieldrank;

PYBIND11_MODULE(_fieldrank, m) {
    m.doc() = "Low-rank field modeling, budgeted informative sampling, and reconstruction";

    py::register_exception<FormatError>(m, "FormatError");
    py::register_exception<NumericalError>(m, "NumericalError");

    py::class_<Region, std::shared_ptr<Region>>(m, "Region")
        .def(py::init<int, int, std::vector<std::uint8_t>>(), py::arg("rows"), py::arg("cols"),
             py::arg("valid_mask"))
        .def_static("full", &Region::full, py::arg("rows"), py::arg("cols"))
        .def_property_readonly("rows", &Region::rows)
        .def_property_readonly("cols", &Region::cols)
        .def_property_readonly("num_valid", &Region::num_valid)
        .def("is_valid", &Region::is_valid)
        .def("dense_index", &Region::dense_index)
        .def("cell_of_dense", &Region::cell_of_dense);

    m.def("cell_coords", &cell_coords);
    m.def("cell_from_coords", &cell_from_coords);
    m.def("euclidean", &euclidean);
    m.def("neighbors", &neighbors);

    py::class_<Snapshot>(m, "Snapshot")
        .def(py::init([](RegionPtr region, Eigen::VectorXd values) {
                 if (values.size() != region->num_valid())
                     throw std::invalid_argument("Snapshot: values length != L");
                 return Snapshot{std::move(region), std::move(values)};
             }),
             py::arg("region"), py::arg("values"))
        .def_readonly("region", &Snapshot::region)
        .def_readonly("values", &Snapshot::values)
        .def("num_present", &Snapshot::num_present);

    py::class_<DataMatrix>(m, "DataMatrix")
        .def_readonly("values", &DataMatrix::values)
        .def_readonly("mask", &DataMatrix::mask)
        .def_property_readonly("T", &DataMatrix::T)
        .def_property_readonly("L", &DataMatrix::L);

    m.def("stack_to_matrix", &stack_to_matrix);
    m.def("load_snapshot", &load_snapshot);
    m.def("store_snapshot", &store_snapshot);
    m.def("load_region", [](const std::filesystem::path& p) {
        return std::make_shared<Region>(load_region(p));
    });
    m.def("store_region", &store_region);

    py::class_<LowRankModel>(m, "LowRankModel")
        .def(py::init([](Eigen::MatrixXd X, Eigen::MatrixXd Y) {
                 if (X.rows() != Y.rows())
                     throw std::invalid_argument("LowRankModel: X and Y rank mismatch");
                 return LowRankModel{std::move(X), std::move(Y)};
             }),
             py::arg("X"), py::arg("Y"))
        .def_readonly("X", &LowRankModel::X)
        .def_readonly("Y", &LowRankModel::Y)
        .def_property_readonly("rank", &LowRankModel::rank);

    py::class_<FitConfig>(m, "FitConfig")
        .def(py::init<>())
        .def_readwrite("rank", &FitConfig::rank)
        .def_readwrite("max_iters", &FitConfig::max_iters)
        .def_readwrite("rel_tol", &FitConfig::rel_tol)
        .def_readwrite("ridge", &FitConfig::ridge)
        .def_readwrite("seed", &FitConfig::seed);

    py::class_<FitResult>(m, "FitResult")
        .def_readonly("model", &FitResult::model)
        .def_readonly("objective_history", &FitResult::objective_history)
        .def_readonly("iterations", &FitResult::iterations);

    m.def("fit", &fit, py::arg("data"), py::arg("config"));
    m.def("objective", &objective);
    m.def("estimate_latent", &estimate_latent, py::arg("Y"), py::arg("observations"));

    py::class_<Completion>(m, "Completion")
        .def_readonly("values", &Completion::values)
        .def_readonly("latent", &Completion::latent)
        .def_readonly("low_sample", &Completion::low_sample);

    m.def("complete", &complete, py::arg("model"), py::arg("observations"));
    m.def("save_model", &save_model);
    m.def("load_model", &load_model);

    py::class_<Tour>(m, "Tour")
        .def_readonly("order", &Tour::order)
        .def_readonly("cost", &Tour::cost);

    m.def("nn_order", &nn_order);
    m.def("nn_cost", &nn_cost);
    m.def("fisher_info", &fisher_info, py::arg("Y"), py::arg("cells"), py::arg("jitter") = 1e-9);

    py::class_<PlannerConfig>(m, "PlannerConfig")
        .def(py::init<>())
        .def_readwrite("budget", &PlannerConfig::budget)
        .def_readwrite("jitter", &PlannerConfig::jitter)
        .def_readwrite("info_tol", &PlannerConfig::info_tol)
        .def_readwrite("candidate_pool", &PlannerConfig::candidate_pool)
        .def_readwrite("seed", &PlannerConfig::seed);

    py::class_<SamplePlan>(m, "SamplePlan")
        .def_readonly("start", &SamplePlan::start)
        .def_readonly("cells", &SamplePlan::cells)
        .def_readonly("path", &SamplePlan::path)
        .def_readonly("cost", &SamplePlan::cost)
        .def_readonly("fisher", &SamplePlan::fisher)
        .def_readonly("budget", &SamplePlan::budget)
        .def_readonly("init_cells", &SamplePlan::init_cells)
        .def_readonly("over_budget", &SamplePlan::over_budget)
        .def_readonly("method", &SamplePlan::method);

    m.def("plan", &plan, py::arg("Y"), py::arg("region"), py::arg("start"), py::arg("config"));
    m.def("store_plan", &store_plan);
    m.def(
        "transect",
        [](const Region& region, CellId start, const std::string& dir, double budget) {
            return transect(region, start, transect_direction_from_name(dir), budget);
        },
        py::arg("region"), py::arg("start"), py::arg("direction"), py::arg("budget"));
    m.def("random_walk", &random_walk, py::arg("region"), py::arg("start"), py::arg("budget"),
          py::arg("seed"));

    py::class_<SynthConfig>(m, "SynthConfig")
        .def(py::init<>())
        .def_readwrite("rows", &SynthConfig::rows)
        .def_readwrite("cols", &SynthConfig::cols)
        .def_readwrite("rank", &SynthConfig::rank)
        .def_readwrite("t_train", &SynthConfig::t_train)
        .def_readwrite("t_test", &SynthConfig::t_test)
        .def_readwrite("noise_sigma", &SynthConfig::noise_sigma)
        .def_readwrite("missing_prob", &SynthConfig::missing_prob)
        .def_readwrite("smoothness", &SynthConfig::smoothness)
        .def_readwrite("seed", &SynthConfig::seed);

    py::class_<SynthData>(m, "SynthData")
        .def_readonly("region", &SynthData::region)
        .def_readonly("train", &SynthData::train)
        .def_readonly("test", &SynthData::test)
        .def_readonly("truth", &SynthData::truth);

    m.def("synth_generate", &synth_generate);
    m.def("simulate_observations", &simulate_observations);
    m.def("reconstruction_error", &reconstruction_error, py::arg("pred"), py::arg("truth"),
          py::arg("sampled_dense") = std::vector<int>{}, py::arg("include_sampled") = false);
}
