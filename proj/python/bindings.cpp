#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>
#include <vector>

#include "gbafs/baselines.hpp"
#include "gbafs/classify.hpp"
#include "gbafs/errors.hpp"
#include "gbafs/kmedoids.hpp"
#include "gbafs/knee.hpp"
#include "gbafs/parallel.hpp"
#include "gbafs/pipeline.hpp"
#include "gbafs/separability.hpp"
#include "gbafs/tsne.hpp"
#include "gbafs/validity.hpp"

namespace py = pybind11;
using namespace gbafs;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;
using IndexArray = py::array_t<long long, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const Array& a) {
    if (a.ndim() != 2) throw ConfigError("expected a 2-D array");
    Matrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
    std::copy(a.data(), a.data() + a.size(), m.values().begin());
    return m;
}

Array to_array(const Matrix& m) {
    Array out({m.rows(), m.cols()});
    std::copy(m.values().begin(), m.values().end(), out.mutable_data());
    return out;
}

std::vector<std::size_t> to_indices(const IndexArray& a) {
    std::vector<std::size_t> out;
    out.reserve(static_cast<std::size_t>(a.size()));
    for (py::ssize_t i = 0; i < a.size(); ++i) {
        if (a.data()[i] < 0) throw ConfigError("indices must be non-negative");
        out.push_back(static_cast<std::size_t>(a.data()[i]));
    }
    return out;
}

// Labels are arbitrary integers; classes are numbered by first appearance.
Dataset to_dataset(const Array& x, const IndexArray& y, std::vector<std::string> names) {
    Dataset d;
    d.instances = to_matrix(x);
    if (static_cast<std::size_t>(y.size()) != d.rows()) throw ConfigError("X and y differ in length");
    std::map<long long, std::size_t> index;
    for (py::ssize_t i = 0; i < y.size(); ++i) {
        const long long v = y.data()[i];
        auto [it, inserted] = index.emplace(v, d.class_ids.size());
        if (inserted) d.class_ids.push_back(std::to_string(v));
        d.labels.push_back(it->second);
    }
    if (names.empty()) {
        for (std::size_t f = 0; f < d.features(); ++f) names.push_back("f" + std::to_string(f));
    }
    if (names.size() != d.features()) throw ConfigError("feature_names must match the number of columns");
    d.feature_names = std::move(names);
    return d;
}

ClusteringResult clustering_from(const std::vector<std::size_t>& medoids, const std::vector<std::size_t>& assignment) {
    ClusteringResult c;
    c.medoids = medoids;
    c.assignment = assignment;
    return c;
}

py::dict index_dict(const IndexReport& r) {
    py::dict d;
    d["value"] = r.aggregate ? py::cast(*r.aggregate) : py::none();
    d["per_point"] = r.per_point;
    d["included"] = std::vector<bool>(r.included.begin(), r.included.end());
    d["distance_evaluations"] = r.distance_evaluations;
    return d;
}

py::dict clustering_dict(const ClusteringResult& c) {
    py::dict d;
    d["medoids"] = c.medoids;
    d["assignment"] = c.assignment;
    d["cost"] = c.cost;
    d["swap_rounds"] = c.swap_rounds;
    return d;
}

}  // namespace

PYBIND11_MODULE(_gbafs, m) {
    m.doc() = "Graph-based automatic feature selection";

    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    m.def("set_max_threads", &set_max_threads, py::arg("threads"), "Worker threads; 0 uses every core.");

    m.def(
        "feature_space",
        [](const Array& x, const IndexArray& y) { return to_array(build_feature_space(to_dataset(x, y, {})).z); },
        py::arg("X"), py::arg("y"),
        "Per-feature Jeffries-Matusita class-pair matrices, one flattened C x C row per feature.");

    m.def(
        "embed",
        [](const Array& points, double perplexity, std::size_t iterations, std::uint64_t seed, std::size_t dims) {
            TsneConfig cfg;
            cfg.perplexity = perplexity;
            cfg.iterations = iterations;
            cfg.seed = seed;
            cfg.output_dim = dims;
            Embedding e;
            {
                py::gil_scoped_release release;
                e = embed(to_matrix(points), cfg);
            }
            py::dict d;
            d["coords"] = to_array(e.coords);
            d["initial_kl"] = e.initial_kl;
            d["final_kl"] = e.final_kl;
            d["unconverged_rows"] = e.unconverged_rows;
            return d;
        },
        py::arg("points"), py::arg("perplexity") = 30.0, py::arg("iterations") = 1000, py::arg("seed") = 0,
        py::arg("dims") = 2, "Exact t-SNE embedding of the rows of `points`.");

    m.def(
        "pam",
        [](const Array& points, std::size_t k, std::uint64_t seed, std::size_t restarts) {
            PamOptions options;
            options.restarts = restarts;
            return clustering_dict(pam_cluster_points(to_matrix(points), k, seed, options));
        },
        py::arg("points"), py::arg("k"), py::arg("seed") = 0, py::arg("restarts") = 1,
        "k-medoids (PAM with k-means++ start) on Euclidean rows.");

    m.def(
        "mss",
        [](const Array& points, const std::vector<std::size_t>& medoids, const std::vector<std::size_t>& assignment) {
            return index_dict(mean_simplified_silhouette(to_matrix(points), clustering_from(medoids, assignment)));
        },
        py::arg("points"), py::arg("medoids"), py::arg("assignment"),
        "Mean simplified silhouette; value is None when every cluster is a singleton.");
    m.def(
        "simplified_silhouette",
        [](const Array& points, const std::vector<std::size_t>& medoids, const std::vector<std::size_t>& assignment) {
            return index_dict(simplified_silhouette(to_matrix(points), clustering_from(medoids, assignment)));
        },
        py::arg("points"), py::arg("medoids"), py::arg("assignment"));
    m.def(
        "silhouette",
        [](const Array& points, const std::vector<std::size_t>& medoids, const std::vector<std::size_t>& assignment) {
            return index_dict(silhouette(to_matrix(points), clustering_from(medoids, assignment)));
        },
        py::arg("points"), py::arg("medoids"), py::arg("assignment"));

    m.def(
        "kneedle",
        [](std::vector<double> xs, std::vector<double> ys, double sensitivity, std::size_t smoothing) {
            Curve c{std::move(xs), std::move(ys), smoothing, sensitivity};
            const auto r = kneedle(c);
            return r.x ? py::cast(*r.x) : py::none();
        },
        py::arg("xs"), py::arg("ys"), py::arg("sensitivity") = 1.0, py::arg("smoothing") = 0,
        "Knee x of the curve, or None.");

    m.def(
        "select_features",
        [](const Array& x, const IndexArray& y, std::vector<std::string> names, std::uint64_t seed, double perplexity,
           std::size_t iterations, std::size_t folds, std::size_t k_max, double sensitivity) {
            const Dataset d = to_dataset(x, y, std::move(names));
            PipelineConfig cfg;
            cfg.seed = seed;
            cfg.tsne.perplexity = perplexity;
            cfg.tsne.iterations = iterations;
            cfg.fold_count = folds;
            cfg.k_max = k_max;
            cfg.knee_sensitivity = sensitivity;
            SelectionResult r;
            {
                py::gil_scoped_release release;
                r = select_features(d, cfg);
            }
            py::dict out;
            out["k_min"] = r.k_min;
            out["selected"] = r.selected_features;
            out["selected_names"] = r.selected_names;
            out["ks"] = r.curve.ks;
            out["mss"] = r.curve.averaged;
            out["silhouette"] = r.curve.averaged_silhouette;
            out["simplified_silhouette"] = r.curve.averaged_simplified;
            out["embedding"] = to_array(r.embedding.coords);
            out["knee_fallback"] = r.knee_fallback;
            out["warnings"] = r.warnings;
            return out;
        },
        py::arg("X"), py::arg("y"), py::arg("feature_names") = std::vector<std::string>{}, py::arg("seed") = 0,
        py::arg("perplexity") = 30.0, py::arg("iterations") = 1000, py::arg("folds") = 5, py::arg("k_max") = 0,
        py::arg("knee_sensitivity") = 1.0, "Run the full selection on a labeled training matrix.");

    m.def(
        "fisher_scores", [](const Array& x, const IndexArray& y) { return fisher_scores(to_dataset(x, y, {})).scores; },
        py::arg("X"), py::arg("y"));
    m.def(
        "relieff_weights",
        [](const Array& x, const IndexArray& y, std::size_t neighbors, std::size_t samples, std::uint64_t seed) {
            return relieff_weights(to_dataset(x, y, {}), {neighbors, samples, seed}).scores;
        },
        py::arg("X"), py::arg("y"), py::arg("neighbors") = 10, py::arg("samples") = 0, py::arg("seed") = 0);
    m.def(
        "cfs_select", [](const Array& x, const IndexArray& y, std::size_t k) { return cfs_select(to_dataset(x, y, {}), k); },
        py::arg("X"), py::arg("y"), py::arg("k"));
    m.def("random_select", &random_select, py::arg("m"), py::arg("k"), py::arg("seed") = 0);

    m.def(
        "knn_predict",
        [](const Array& x_train, const IndexArray& y_train, const Array& x_test, const IndexArray& subset,
           std::size_t neighbors) {
            // Predictions come back as the original label values.
            const Dataset train = to_dataset(x_train, y_train, {});
            Dataset test;
            test.instances = to_matrix(x_test);
            test.labels.assign(test.rows(), 0);
            test.class_ids = train.class_ids;
            test.feature_names = train.feature_names;
            const auto pred = knn_predict(train, test, to_indices(subset), neighbors);
            std::vector<long long> out;
            for (auto p : pred) out.push_back(std::stoll(train.class_ids[p]));
            return out;
        },
        py::arg("X_train"), py::arg("y_train"), py::arg("X_test"), py::arg("subset"), py::arg("neighbors") = 5);
    m.def("accuracy", &accuracy, py::arg("pred"), py::arg("truth"));
    m.def("balanced_f", &balanced_f, py::arg("pred"), py::arg("truth"));
}
