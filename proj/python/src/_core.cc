// Copyright 2026 the retrievalguard authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "rguard/certifier.h"
#include "rguard/cli.h"
#include "rguard/eval.h"
#include "rguard/models.h"
#include "rguard/normal.h"
#include "rguard/oracle.h"
#include "rguard/smoothing.h"

namespace py = pybind11;
using namespace rguard;

namespace {

using Sample = std::tuple<std::string, std::string, std::vector<double>>;

std::vector<LabeledSample> to_samples(const std::vector<Sample>& in) {
  std::vector<LabeledSample> out;
  out.reserve(in.size());
  for (const auto& [id, label, x] : in) out.push_back({id, label, InputVector(x)});
  return out;
}

SmoothingConfig smoothing(double sigma, std::uint64_t n, double alpha, std::uint64_t seed, std::size_t batch) {
  SmoothingConfig c{sigma, n, alpha, seed, batch};
  c.validate();
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Certified L2 robustness radii for Gaussian-smoothed 1-NN retrieval";

  static py::exception<Error> error_type(m, "Error", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::handle(error_type.ptr())(py::str(e.what()));
      exc.attr("code") = error_code_name(e.code());
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  m.def("normal_cdf", &normal_cdf);
  m.def("normal_quantile", &normal_quantile);
  m.def("chernoff_epsilon", [](double F, std::size_t k, std::uint64_t n, double alpha) {
    return chernoff_epsilon(NormBound(F), k, n, alpha);
  }, py::arg("F"), py::arg("k"), py::arg("n"), py::arg("alpha"));
  m.def("margin_lower_bound", [](double d_hat, double F, std::size_t k, std::uint64_t n, double alpha) {
    return margin_lower_bound(d_hat, NormBound(F), k, n, alpha);
  }, py::arg("d_hat"), py::arg("F"), py::arg("k"), py::arg("n"), py::arg("alpha"));
  m.def("lipschitz_bound_tight", [](double dist, double sigma, double F) {
    return lipschitz_bound_tight(dist, sigma, NormBound(F));
  }, py::arg("dist"), py::arg("sigma"), py::arg("F") = 1.0);
  m.def("lipschitz_bound_loose", [](double dist, double sigma, double F) {
    return lipschitz_bound_loose(dist, sigma, NormBound(F));
  }, py::arg("dist"), py::arg("sigma"), py::arg("F") = 1.0);
  m.def("certified_radius", [](double d, double sigma, double F) {
    return certified_radius(d, sigma, NormBound(F));
  }, py::arg("d"), py::arg("sigma"), py::arg("F") = 1.0);
  m.def("exact_smooth_sign", [](double x, double sigma, double F) {
    return exact_smooth_sign(x, sigma, NormBound(F));
  }, py::arg("x"), py::arg("sigma"), py::arg("F") = 1.0);

  py::class_<BaseModel>(m, "BaseModel")
      .def_static("sign1d", [](double F) { return BaseModel::sign1d(NormBound(F)); }, py::arg("F") = 1.0)
      .def_static("linear",
                  [](std::size_t d, std::size_t k, std::vector<double> w, std::vector<double> b, double F) {
                    return BaseModel::linear(d, k, std::move(w), std::move(b), NormBound(F));
                  },
                  py::arg("d"), py::arg("k"), py::arg("weights"), py::arg("bias"), py::arg("F") = 1.0)
      .def_static("constant",
                  [](std::vector<double> c, std::size_t d, double F) {
                    return BaseModel::constant(EmbeddingVector(std::move(c)), d, NormBound(F));
                  },
                  py::arg("c"), py::arg("d"), py::arg("F") = 1.0)
      .def_static("toy_mlp",
                  [](std::uint64_t seed, std::size_t d, std::size_t k, std::size_t hidden, double F) {
                    return make_toy_mlp(seed, d, k, hidden, NormBound(F));
                  },
                  py::arg("seed"), py::arg("d"), py::arg("k"), py::arg("hidden") = 8, py::arg("F") = 1.0)
      .def_property_readonly("kind", [](const BaseModel& h) { return model_kind_name(h.kind()); })
      .def_property_readonly("input_dim", &BaseModel::input_dim)
      .def_property_readonly("output_dim", &BaseModel::output_dim)
      .def_property_readonly("norm_bound", [](const BaseModel& h) { return h.bound().value(); })
      .def("embed", [](const BaseModel& h, std::vector<double> x) { return h.embed(InputVector(std::move(x))).raw(); });

  m.def("smooth_embed_mc",
        [](const BaseModel& h, std::vector<double> x, double sigma, std::uint64_t n, double alpha, std::uint64_t seed,
           const std::string& stream_id, std::size_t batch_size) {
          const auto est = smooth_embed_mc(h, InputVector(std::move(x)), smoothing(sigma, n, alpha, seed, batch_size),
                                           stream_id);
          return py::make_tuple(est.g_hat.raw(), est.epsilon);
        },
        py::arg("model"), py::arg("x"), py::arg("sigma"), py::arg("n"), py::arg("alpha"), py::arg("seed") = 0,
        py::arg("stream_id") = "query", py::arg("batch_size") = kDefaultBatchSize,
        "Returns (g_hat, epsilon).");
  m.def("exact_smooth", [](const BaseModel& h, std::vector<double> x, double sigma, double tol) {
    return make_exact_smoother(h, sigma, tol)(InputVector(std::move(x))).raw();
  }, py::arg("model"), py::arg("x"), py::arg("sigma"), py::arg("tol") = 1e-9);

  py::class_<CertificationRecord>(m, "CertificationRecord")
      .def_readonly("query_id", &CertificationRecord::query_id)
      .def_readonly("label", &CertificationRecord::label)
      .def_property_readonly("score", [](const CertificationRecord& r) { return cert_status_token(r.status); })
      .def_property_readonly("certified", &CertificationRecord::certified)
      .def_readonly("d_hat", &CertificationRecord::d_hat)
      .def_readonly("d_lower", &CertificationRecord::d_lower)
      .def_readonly("radius", &CertificationRecord::radius)
      .def_readonly("nn_same_id", &CertificationRecord::nn_same_id)
      .def_readonly("nn_other_id", &CertificationRecord::nn_other_id)
      .def("__repr__", [](const CertificationRecord& r) {
        std::ostringstream os;
        os << "CertificationRecord(" << r.query_id << ", score=" << cert_status_token(r.status)
           << ", d_hat=" << r.d_hat << ", radius=" << r.radius << ")";
        return os.str();
      });

  m.def("certify",
        [](const std::vector<Sample>& queries, const BaseModel& h, const std::vector<Sample>& gallery, double sigma,
           std::uint64_t n, double alpha, std::uint64_t seed, std::size_t batch_size) {
          const auto q = to_samples(queries);
          const auto g = to_samples(gallery);
          const auto cfg = smoothing(sigma, n, alpha, seed, batch_size);
          py::gil_scoped_release release;
          return certify_dataset(q, h, g, cfg);
        },
        py::arg("queries"), py::arg("model"), py::arg("gallery"), py::arg("sigma"), py::arg("n"), py::arg("alpha"),
        py::arg("seed") = 0, py::arg("batch_size") = kDefaultBatchSize,
        "Samples are (id, label, input) tuples; returns one record per query.");
  m.def("recall_at_1_curve",
        [](const std::vector<CertificationRecord>& records, const std::vector<double>& radii, bool exclude_rejected) {
          return recall_at_1_curve(records, radii, exclude_rejected).values;
        },
        py::arg("records"), py::arg("radii"), py::arg("exclude_rejected") = false);
  m.def("default_radius_grid", [](const std::vector<CertificationRecord>& records, std::size_t points) {
    return default_radius_grid(records, points);
  }, py::arg("records"), py::arg("points") = 50);
  m.def("rejected_ratio", [](const std::vector<CertificationRecord>& records, bool d_hat_positive_only) {
    return rejected_ratio(records, d_hat_positive_only);
  }, py::arg("records"), py::arg("d_hat_positive_only") = true);

  m.def("run_cli", [](std::vector<std::string> args) {
    args.insert(args.begin(), "rguard");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, "Runs the rguard command line in-process; returns (exit_code, stdout, stderr).");
}
