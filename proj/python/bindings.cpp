#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "freqreg/data.hpp"
#include "freqreg/dct.hpp"
#include "freqreg/freq_tensor.hpp"
#include "freqreg/gradcheck.hpp"
#include "freqreg/schedule.hpp"
#include "freqreg/serialize.hpp"
#include "freqreg/tensor.hpp"
#include "freqreg/zigzag.hpp"

namespace py = pybind11;
using namespace freqreg;

namespace {

DenseTensor tensor_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    std::vector<std::size_t> shape(a.ndim());
    for (py::ssize_t i = 0; i < a.ndim(); ++i) shape[i] = static_cast<std::size_t>(a.shape(i));
    std::vector<double> data(a.data(), a.data() + a.size());
    return DenseTensor(std::move(shape), std::move(data));
}

py::array_t<double> array_from_tensor(const DenseTensor& t) {
    std::vector<py::ssize_t> shape(t.shape.begin(), t.shape.end());
    py::array_t<double> a(shape);
    std::copy(t.data.begin(), t.data.end(), a.mutable_data());
    return a;
}

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Frequency-domain parameter tensors: cosine transforms, zigzag "
              "truncation, and packed serialization";

    m.def("idct_1d", [](const std::vector<double>& v) { return idct_1d(v); });
    m.def("dct_1d", [](const std::vector<double>& v) { return dct_1d(v); });
    m.def("idct_nd", [](const Array& a) { return array_from_tensor(idct_nd(tensor_from_array(a))); });
    m.def("dct_nd", [](const Array& a) { return array_from_tensor(dct_nd(tensor_from_array(a))); });
    m.def("idct_nd_adjoint",
          [](const Array& a) { return array_from_tensor(idct_nd_adjoint(tensor_from_array(a))); });

    py::class_<ZigzagPlan>(m, "ZigzagPlan")
        .def(py::init([](const std::vector<std::size_t>& shape) { return build_plan(shape); }))
        .def_property_readonly("shape", [](const ZigzagPlan& p) { return p.shape; })
        .def_property_readonly("order", [](const ZigzagPlan& p) { return p.order; })
        .def("total", &ZigzagPlan::total)
        .def("max_threshold", &ZigzagPlan::max_threshold)
        .def("count_below", &ZigzagPlan::count_below)
        .def("mask",
             [](const ZigzagPlan& p, std::size_t eps) { return array_from_tensor(mask(p, eps)); })
        .def("threshold_for_ratio",
             [](const ZigzagPlan& p, double ratio, std::uint64_t min_keep) {
                 const auto r = threshold_for_ratio(p, ratio, min_keep);
                 return py::make_tuple(r.epsilon, r.kept);
             },
             py::arg("ratio"), py::arg("min_keep") = 1);

    py::class_<FrequencyTensor>(m, "FrequencyTensor")
        .def_static("from_spatial",
                    [](const Array& a, std::size_t eps) {
                        return FrequencyTensor::from_spatial(tensor_from_array(a), eps);
                    })
        .def_static("from_coefficients",
                    [](const Array& a, std::size_t eps) {
                        return FrequencyTensor::from_coefficients(tensor_from_array(a), eps);
                    })
        .def("reconstruct",
             [](const FrequencyTensor& t) { return array_from_tensor(t.reconstruct()); })
        .def("backward",
             [](const FrequencyTensor& t, const Array& g) {
                 return array_from_tensor(t.backward(tensor_from_array(g)));
             })
        .def("apply_truncation", &FrequencyTensor::apply_truncation)
        .def_property_readonly("epsilon", &FrequencyTensor::epsilon)
        .def_property_readonly("shape", [](const FrequencyTensor& t) { return t.shape(); })
        .def_property_readonly(
            "coefficients",
            [](const FrequencyTensor& t) { return array_from_tensor(t.coefficients()); })
        .def("nonzero_budget", &FrequencyTensor::nonzero_budget)
        .def("nonzero_count", &FrequencyTensor::nonzero_count);

    py::class_<TruncationSchedule>(m, "TruncationSchedule")
        .def(py::init<double, double>(), py::arg("gamma"), py::arg("epsilon_ratio"))
        .def("step", &TruncationSchedule::step)
        .def_readonly("beta", &TruncationSchedule::beta)
        .def_readonly("epoch", &TruncationSchedule::epoch)
        .def_static("closed_form", &TruncationSchedule::closed_form);

    m.def("pack_tensor",
          [](const FrequencyTensor& t, const std::string& dtype) {
              const auto bytes =
                  pack_tensor(t, dtype == "half" ? CoeffDtype::Half : CoeffDtype::Single);
              return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
          },
          py::arg("tensor"), py::arg("dtype") = "single");
    m.def("unpack_tensor", [](const py::bytes& b) {
        const std::string s = b;
        return unpack_tensor(std::vector<std::uint8_t>(s.begin(), s.end()));
    });

    m.def("gradcheck",
          [](const std::vector<std::size_t>& shape, std::size_t epsilon, std::uint64_t seed) {
              const auto r = gradcheck_frequency_tensor(shape, epsilon, seed);
              return py::make_tuple(r.max_rel_error, r.pass);
          },
          py::arg("shape"), py::arg("epsilon"), py::arg("seed") = 0);

    m.def("synthetic_blobs",
          [](std::size_t classes, std::size_t per_class, std::size_t dim, std::uint64_t seed) {
              const LabeledDataset ds = synthetic_blobs(classes, per_class, dim, seed);
              return py::make_tuple(array_from_tensor(ds.images), ds.labels);
          });
}
