// Python bindings: numpy in, numpy out. Reports cross the boundary as JSON text
// and are parsed on the Python side.

#include "protoclass/classifiers.hpp"
#include "protoclass/errors.hpp"
#include "protoclass/evaluation.hpp"
#include "protoclass/linalg.hpp"
#include "protoclass/prototypes.hpp"
#include "protoclass/store.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

namespace py = pybind11;
using namespace protoclass;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

Vector to_vector(const FloatArray& a) {
    if (a.ndim() != 1) throw Error(ErrorCode::DimMismatch, "expected a 1-D array");
    return Vector(a.data(), a.data() + a.size());
}

EmbeddingMatrix to_matrix(const FloatArray& a) {
    if (a.ndim() != 2) throw Error(ErrorCode::DimMismatch, "expected a 2-D array");
    const auto rows = static_cast<std::size_t>(a.shape(0)), dim = static_cast<std::size_t>(a.shape(1));
    return EmbeddingMatrix(dim, std::vector<float>(a.data(), a.data() + rows * dim));
}

py::array_t<float> to_array(VectorView v) {
    py::array_t<float> out({static_cast<py::ssize_t>(v.size())}, {static_cast<py::ssize_t>(sizeof(float))});
    std::memcpy(out.mutable_data(), v.data(), v.size() * sizeof(float));
    return out;
}

py::array_t<float> to_array(const EmbeddingMatrix& m) {
    py::array_t<float> out({static_cast<py::ssize_t>(m.rows()), static_cast<py::ssize_t>(m.dim())});
    std::memcpy(out.mutable_data(), m.values().data(), m.values().size() * sizeof(float));
    return out;
}

py::array_t<double> to_array(const std::vector<double>& v, std::size_t rows, std::size_t cols) {
    py::array_t<double> out({static_cast<py::ssize_t>(rows), static_cast<py::ssize_t>(cols)});
    std::memcpy(out.mutable_data(), v.data(), v.size() * sizeof(double));
    return out;
}

EmbeddingSet make_set(const FloatArray& vectors, std::vector<ClassId> class_ids, std::vector<std::string> source_ids,
                      std::vector<std::string> class_names, const std::string& split, const std::string& encoder) {
    auto m = to_matrix(vectors);
    if (class_ids.size() != m.rows() || source_ids.size() != m.rows()) {
        throw Error(ErrorCode::LengthMismatch, "vectors, class_ids and source_ids must have the same length");
    }
    EmbeddingSet s(m.dim(), ClassCatalog(std::move(class_names)));
    s.vectors = std::move(m);
    s.class_ids = std::move(class_ids);
    s.source_ids = std::move(source_ids);
    s.split = parse_split_tag(split);
    s.encoder = encoder;
    s.validate();
    return s;
}

PipelineConfig make_pipeline(const std::string& rule, double temperature, std::size_t k,
                             std::optional<std::size_t> prototype_samples, std::optional<std::size_t> pca_dim,
                             std::uint64_t seed, unsigned parallel) {
    PipelineConfig cfg;
    cfg.rule = parse_rule(rule);
    cfg.classifier.temperature = temperature;
    cfg.classifier.k = k;
    cfg.classifier.parallel = parallel;
    cfg.prototype_samples = prototype_samples;
    cfg.pca_dim = pca_dim;
    cfg.seed = seed;
    return cfg;
}

py::tuple predictions_to_numpy(const std::vector<Prediction>& predictions, std::size_t classes) {
    py::array_t<std::uint32_t> ids({static_cast<py::ssize_t>(predictions.size())},
                                   {static_cast<py::ssize_t>(sizeof(std::uint32_t))});
    std::vector<double> scores;
    scores.reserve(predictions.size() * classes);
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        ids.mutable_data()[i] = predictions[i].class_id;
        scores.insert(scores.end(), predictions[i].scores.begin(), predictions[i].scores.end());
    }
    return py::make_tuple(ids, to_array(scores, predictions.size(), classes));
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Prototype and nearest-neighbor classification over embedding sets";

    static py::exception<Error> error_type(m, "Error", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const FormatError& e) {
            py::object err = py::reinterpret_borrow<py::object>(error_type.ptr())(e.what());
            err.attr("code") = std::string(to_string(e.code()));
            err.attr("reason") = std::string(to_string(e.reason()));
            PyErr_SetObject(error_type.ptr(), err.ptr());
        } catch (const Error& e) {
            py::object err = py::reinterpret_borrow<py::object>(error_type.ptr())(e.what());
            err.attr("code") = std::string(to_string(e.code()));
            err.attr("reason") = py::none();
            PyErr_SetObject(error_type.ptr(), err.ptr());
        }
    });

    // Vector kernels.
    m.def("l2_normalize", [](const FloatArray& v) { return to_array(l2_normalize(to_vector(v))); }, py::arg("v"));
    m.def("cosine_sim", [](const FloatArray& a, const FloatArray& b) { return cosine_sim(to_vector(a), to_vector(b)); },
          py::arg("a"), py::arg("b"));
    m.def("euclidean_dist",
          [](const FloatArray& a, const FloatArray& b) { return euclidean_dist(to_vector(a), to_vector(b)); },
          py::arg("a"), py::arg("b"));
    m.def("mean_vector", [](const FloatArray& rows) { return to_array(mean_vector(to_matrix(rows))); },
          py::arg("rows"));
    m.def("fuse_concat",
          [](const FloatArray& a, const FloatArray& b) { return to_array(fuse_concat(to_vector(a), to_vector(b))); },
          py::arg("a"), py::arg("b"));
    m.def("softmax_scores", &softmax_scores, py::arg("similarities"), py::arg("temperature") = 0.01);

    py::class_<PcaModel>(m, "PcaModel")
        .def_readonly("input_dim", &PcaModel::input_dim)
        .def_readonly("output_dim", &PcaModel::output_dim)
        .def_readonly("total_variance", &PcaModel::total_variance)
        .def_property_readonly("mean", [](const PcaModel& p) { return to_array(p.mean); })
        .def_property_readonly("components",
                               [](const PcaModel& p) { return to_array(p.components, p.output_dim, p.input_dim); })
        .def_property_readonly("explained_variance", [](const PcaModel& p) { return p.explained_variance; })
        .def("transform",
             [](const PcaModel& p, const FloatArray& a) -> py::array_t<float> {
                 if (a.ndim() == 1) return to_array(p.transform(to_vector(a)));
                 return to_array(p.transform(to_matrix(a)));
             })
        .def("inverse_transform", [](const PcaModel& p, const FloatArray& a) {
            return to_array(p.inverse_transform(to_vector(a)));
        });
    m.def("pca_fit", [](const FloatArray& rows, std::size_t dim) { return pca_fit(to_matrix(rows), dim); },
          py::arg("rows"), py::arg("output_dim"));

    // Embedding sets and files.
    py::class_<EmbeddingSet>(m, "EmbeddingSet")
        .def(py::init(&make_set), py::arg("vectors"), py::arg("class_ids"), py::arg("source_ids"),
             py::arg("class_names"), py::arg("split") = "other", py::arg("encoder") = "")
        .def("__len__", &EmbeddingSet::size)
        .def_property_readonly("dim", &EmbeddingSet::dim)
        .def_property_readonly("vectors", [](const EmbeddingSet& s) { return to_array(s.vectors); })
        .def_readonly("class_ids", &EmbeddingSet::class_ids)
        .def_readonly("source_ids", &EmbeddingSet::source_ids)
        .def_property_readonly("class_names", [](const EmbeddingSet& s) { return s.catalog.names(); })
        .def_property_readonly("split", [](const EmbeddingSet& s) { return std::string(to_string(s.split)); })
        .def_readonly("encoder", &EmbeddingSet::encoder)
        .def_readonly("cleaned", &EmbeddingSet::cleaned)
        .def("__eq__", &EmbeddingSet::operator==);
    m.def("read_set", &read_set, py::arg("path"));
    m.def("write_set", &write_set, py::arg("set"), py::arg("path"));
    m.def("sample_per_class", [](const EmbeddingSet& s, std::optional<std::size_t> n, std::uint64_t seed) {
        return sample_per_class(s, n, seed).set;
    }, py::arg("set"), py::arg("n"), py::arg("seed") = 0);

    // Prototypes.
    py::class_<PrototypeBank>(m, "PrototypeBank")
        .def("__len__", &PrototypeBank::size)
        .def_readonly("dim", &PrototypeBank::dim)
        .def_property_readonly("source", [](const PrototypeBank& b) { return std::string(to_string(b.source)); })
        .def_property_readonly("vectors",
                               [](const PrototypeBank& b) {
                                   EmbeddingMatrix m(b.dim);
                                   for (const auto& p : b.prototypes) m.append(p.vector);
                                   return to_array(m);
                               })
        .def_property_readonly("support_counts", [](const PrototypeBank& b) {
            std::vector<std::size_t> out;
            for (const auto& p : b.prototypes) out.push_back(p.support_count);
            return out;
        });
    m.def("build_visual_prototypes", &build_visual_prototypes, py::arg("gallery"),
          py::arg("per_class_samples") = py::none(), py::arg("seed") = 0);
    m.def("build_text_prototypes", &build_text_prototypes, py::arg("text_embeddings"));
    m.def("build_caption_prototypes",
          [](const std::vector<EmbeddingSet>& sets, const std::string& split) {
              return build_caption_prototypes(sets, parse_caption_split(split));
          },
          py::arg("caption_embeddings"), py::arg("split") = "train");
    m.def("expand_templates", [](const std::string& bank, const std::vector<std::string>& names) {
        return expand_templates(TemplateBank::builtin(bank), ClassCatalog(names));
    }, py::arg("bank"), py::arg("class_names"));

    // Classification; returns (class ids, scores) as numpy arrays.
    m.def("classify",
          [](const EmbeddingSet& queries, const PrototypeBank& bank, const std::string& rule, double temperature,
             unsigned parallel) {
              ClassifierConfig cfg;
              cfg.temperature = temperature;
              cfg.parallel = parallel;
              return predictions_to_numpy(classify_batch(queries, parse_rule(rule), cfg, bank), bank.size());
          },
          py::arg("queries"), py::arg("bank"), py::arg("rule") = "npc", py::arg("temperature") = 0.01,
          py::arg("parallel") = 0);
    m.def("classify_knn",
          [](const EmbeddingSet& queries, const EmbeddingSet& gallery, std::size_t k, unsigned parallel) {
              ClassifierConfig cfg;
              cfg.k = k;
              cfg.parallel = parallel;
              return predictions_to_numpy(classify_batch(queries, Rule::Knn, cfg, gallery), gallery.catalog.size());
          },
          py::arg("queries"), py::arg("gallery"), py::arg("k") = 11, py::arg("parallel") = 0);
    m.def("top1_accuracy",
          [](const std::vector<ClassId>& predicted, const std::vector<ClassId>& truth) {
              return top1_accuracy(predicted, truth);
          },
          py::arg("predicted"), py::arg("truth"));

    // Evaluation protocols; reports are returned as JSON text.
    m.def("crossval_2fold_json",
          [](const EmbeddingSet& train, const EmbeddingSet& test, const std::string& rule, double temperature,
             std::size_t k, std::optional<std::size_t> samples, std::optional<std::size_t> pca_dim, std::uint64_t seed,
             unsigned parallel) {
              return crossval_2fold(train, test, make_pipeline(rule, temperature, k, samples, pca_dim, seed, parallel))
                  .to_json()
                  .dump();
          },
          py::arg("train"), py::arg("test"), py::arg("rule") = "npc", py::arg("temperature") = 0.01,
          py::arg("k") = 11, py::arg("prototype_samples") = py::none(), py::arg("pca_dim") = py::none(),
          py::arg("seed") = 0, py::arg("parallel") = 0);
    m.def("sweep_k_json",
          [](const EmbeddingSet& train, const EmbeddingSet& test, const std::vector<std::size_t>& ks,
             unsigned parallel) {
              return sweep_k(train, test, ks, make_pipeline("npc", 0.01, 11, std::nullopt, std::nullopt, 0, parallel))
                  .to_json()
                  .dump();
          },
          py::arg("train"), py::arg("test"), py::arg("ks") = std::vector<std::size_t>{1, 3, 5, 7, 11},
          py::arg("parallel") = 0);
    m.def("sweep_samples_json",
          [](const EmbeddingSet& train, const EmbeddingSet& test, const std::vector<std::size_t>& sizes,
             const std::vector<std::uint64_t>& seeds, unsigned parallel) {
              return sweep_prototype_samples(train, test, sizes, seeds,
                                             make_pipeline("npc", 0.01, 11, std::nullopt, std::nullopt, 0, parallel))
                  .to_json()
                  .dump();
          },
          py::arg("train"), py::arg("test"), py::arg("sizes") = std::vector<std::size_t>{50, 25, 20, 15, 10},
          py::arg("seeds") = std::vector<std::uint64_t>{0, 1, 2, 3, 4}, py::arg("parallel") = 0);

    m.def("generate_synthetic",
          [](std::size_t classes, std::size_t dim, std::size_t per_class, double sigma, std::uint64_t seed) {
              SyntheticSpec spec;
              spec.classes = classes;
              spec.dim = dim;
              spec.per_class = per_class;
              spec.sigma = sigma;
              spec.seed = seed;
              auto data = generate_synthetic(spec);
              return py::make_tuple(std::move(data.train), std::move(data.test));
          },
          py::arg("classes") = 28, py::arg("dim") = 64, py::arg("per_class") = 50, py::arg("sigma") = 0.1,
          py::arg("seed") = 0);
}
