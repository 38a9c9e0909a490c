// casefile - offline artifact analysis workbench
// Python module casefile._core

#include <casefile/analysis/report.hpp>
#include <casefile/core/error.hpp>
#include <casefile/core/unicode.hpp>
#include <casefile/disasm/x86.hpp>
#include <casefile/extract/artifacts.hpp>
#include <casefile/extract/compare.hpp>
#include <casefile/extract/digest.hpp>
#include <casefile/extract/entropy.hpp>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace casefile;

namespace {

ByteView view_of(const py::bytes& b) {
    const std::string_view s = b;
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.attr("__version__") = std::string(tool_version);

    py::register_exception<Error>(m, "Error", PyExc_ValueError);

    m.def("identify", [](const py::bytes& data, const std::string& name) {
        AnalysisSession session(builtin_registry());
        const auto id = session.identify(view_of(data), name);
        return py::dict(py::arg("tag") = id.tag, py::arg("method") = to_string(id.method));
    }, py::arg("data"), py::arg("name") = "");

    m.def("analyze_json", [](const py::bytes& data, const std::string& name, bool deep,
                             const std::vector<std::string>& passwords) {
        AnalyzeOptions opt;
        opt.deep = deep;
        opt.passwords = passwords;
        Bytes copy(view_of(data).begin(), view_of(data).end());
        py::gil_scoped_release release;
        return report_json(analyze_buffer(DataBuffer::external(std::move(copy), name), opt), opt);
    }, py::arg("data"), py::arg("name") = "input", py::arg("deep") = false,
       py::arg("passwords") = std::vector<std::string>{});

    m.def("hash", [](const py::bytes& data, const std::vector<std::string>& algorithms) {
        std::map<std::string, std::string> out;
        for (const auto& [alg, hex] : hash_buffer(view_of(data), algorithms)) out[to_string(alg)] = hex;
        return out;
    }, py::arg("data"), py::arg("algorithms") = std::vector<std::string>{"crc32", "md5", "sha1", "sha256"});

    m.def("entropy", [](const py::bytes& data, std::size_t block_size) {
        const auto p = entropy_profile(view_of(data), block_size);
        return py::make_tuple(p.overall, p.blocks);
    }, py::arg("data"), py::arg("block_size") = 256);

    m.def("strings", [](const py::bytes& data, std::size_t min_length) {
        py::list out;
        for (const auto& s : extract_strings(view_of(data), min_length)) {
            out.append(py::make_tuple(s.offset, to_string(s.encoding), s.value));
        }
        return out;
    }, py::arg("data"), py::arg("min_length") = default_min_string_length);

    m.def("artifacts", [](const py::bytes& data, std::size_t min_length, const std::string& tag) {
        py::list out;
        for (const auto& a : scan(view_of(data), min_length, tag)) {
            out.append(py::dict(py::arg("kind") = to_string(a.kind), py::arg("value") = a.value,
                                py::arg("offset") = a.location.offset, py::arg("risk") = to_string(a.risk),
                                py::arg("explanation") = a.explanation));
        }
        return out;
    }, py::arg("data"), py::arg("min_length") = default_min_string_length, py::arg("tag") = "");

    m.def("deobfuscate", [](const std::string& source, std::size_t max_iterations) {
        const Bytes bytes = to_bytes(source);
        const auto r = deobfuscate_text(bytes, max_iterations);
        py::list steps;
        for (const auto& s : r.log.steps) steps.append(py::make_tuple(s.iteration, s.pass, s.changes));
        return py::make_tuple(to_utf8(r.text()), steps, r.log.truncated);
    }, py::arg("source"), py::arg("max_iterations") = default_max_iterations);

    m.def("disassemble", [](const py::bytes& code, unsigned bits, std::uint64_t origin) {
        const auto v = view_of(code);
        py::list out;
        for (const auto& i : linear_sweep(v, 0, v.size(), bits, origin)) out.append(py::make_tuple(i.address, i.text()));
        return out;
    }, py::arg("code"), py::arg("bits") = 32, py::arg("origin") = 0);

    m.def("compare", [](const py::bytes& a, const py::bytes& b) {
        py::list out;
        for (const auto& d : binary_compare(view_of(a), view_of(b))) {
            out.append(py::make_tuple(d.offset_a, d.offset_b, d.length, to_string(d.kind)));
        }
        return out;
    });
}
