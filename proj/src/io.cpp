#include "divsg/io.hpp"

#include <cstring>
#include <fstream>
#include <iomanip>
#include <ostream>

namespace divsg {

namespace {

constexpr char kMagic[4] = {'D', 'V', 'S', 'F'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    T v;
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw FieldError("DVSF: truncated stream");
    return v;
}

void write_header(std::ostream& os, const Domain& dom, std::uint8_t kind, std::uint32_t ncomp) {
    os.write(kMagic, 4);
    put<std::uint32_t>(os, kVersion);
    put<std::uint8_t>(os, kind);
    put<std::uint8_t>(os, std::uint8_t(dom.kind()));
    put<std::uint8_t>(os, std::uint8_t(dom.dim()));
    for (int a = 0; a < dom.dim(); ++a) {
        put<double>(os, dom.lower(a));
        put<double>(os, dom.length(a));
        put<std::uint32_t>(os, std::uint32_t(dom.resolution(a)));
    }
    put<std::uint32_t>(os, ncomp);
}

void write_samples(std::ostream& os, const ScalarField& f) {
    const auto& raw = f.raw();
    os.write(reinterpret_cast<const char*>(raw.data()), std::streamsize(raw.size() * sizeof(double)));
}

}  // namespace

void write_dvsf(std::ostream& os, const ScalarField& f) {
    write_header(os, f.domain(), 1, 1);
    write_samples(os, f);
}

void write_dvsf(std::ostream& os, const VectorField& f, bool map_kind) {
    write_header(os, f.domain(), map_kind ? 3 : 2, std::uint32_t(f.dim()));
    for (int a = 0; a < f.dim(); ++a) write_samples(os, f.comp(a));
}

void write_dvsf_file(const std::string& path, const ScalarField& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw FieldError("cannot open " + path + " for writing");
    write_dvsf(os, f);
}

void write_dvsf_file(const std::string& path, const VectorField& f, bool map_kind) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw FieldError("cannot open " + path + " for writing");
    write_dvsf(os, f, map_kind);
}

DvsfPayload read_dvsf(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0) throw FieldError("DVSF: bad magic");
    const auto version = get<std::uint32_t>(is);
    if (version != kVersion) throw FieldError("DVSF: unsupported version");
    const int kind = get<std::uint8_t>(is);
    const auto dkind = DomainKind(get<std::uint8_t>(is));
    const int dim = get<std::uint8_t>(is);
    if (dim < 1 || dim > kMaxDim) throw FieldError("DVSF: bad dimension");
    Point lower{0, 0, 0}, lengths{0, 0, 0};
    Index res{1, 1, 1};
    for (int a = 0; a < dim; ++a) {
        lower[a] = get<double>(is);
        lengths[a] = get<double>(is);
        res[a] = int(get<std::uint32_t>(is));
    }
    const auto ncomp = get<std::uint32_t>(is);
    DvsfPayload out;
    out.kind = kind;
    out.domain = Domain(dkind, dim, lower, lengths, res);
    for (std::uint32_t c = 0; c < ncomp; ++c) {
        ScalarField f(out.domain);
        auto& raw = f.raw();
        is.read(reinterpret_cast<char*>(raw.data()), std::streamsize(raw.size() * sizeof(double)));
        if (!is) throw FieldError("DVSF: truncated samples");
        out.components.push_back(std::move(f));
    }
    return out;
}

DvsfPayload read_dvsf_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FieldError("cannot open " + path);
    return read_dvsf(is);
}

ScalarField read_scalar_dvsf(const std::string& path) {
    auto p = read_dvsf_file(path);
    if (p.kind != 1 || p.components.size() != 1) throw FieldError("DVSF: not a scalar field: " + path);
    return p.components[0];
}

VectorField read_vector_dvsf(const std::string& path) {
    auto p = read_dvsf_file(path);
    if ((p.kind != 2 && p.kind != 3) || int(p.components.size()) != p.domain.dim())
        throw FieldError("DVSF: not a vector field: " + path);
    VectorField f(p.domain);
    for (int a = 0; a < p.domain.dim(); ++a) f.comp(a) = p.components[a];
    return f;
}

namespace {

void csv_header(std::ostream& os, int dim, int ncomp) {
    const char* coords[] = {"x", "y", "z"};
    for (int a = 0; a < dim; ++a) os << coords[a] << ",";
    if (ncomp == 1) {
        os << "value\n";
    } else {
        for (int c = 0; c < ncomp; ++c) os << "v" << c << (c + 1 < ncomp ? "," : "\n");
    }
}

}  // namespace

void write_csv(std::ostream& os, const ScalarField& f) {
    const Domain& dom = f.domain();
    csv_header(os, dom.dim(), 1);
    os << std::setprecision(17);
    for_each_node(dom, [&](const Index& id) {
        const Point p = dom.node_point(id);
        for (int a = 0; a < dom.dim(); ++a) os << p[a] << ",";
        os << f.at(id) << "\n";
    });
}

void write_csv(std::ostream& os, const VectorField& f) {
    const Domain& dom = f.domain();
    csv_header(os, dom.dim(), f.dim());
    os << std::setprecision(17);
    for_each_node(dom, [&](const Index& id) {
        const Point p = dom.node_point(id);
        for (int a = 0; a < dom.dim(); ++a) os << p[a] << ",";
        for (int c = 0; c < f.dim(); ++c) os << f.comp(c).at(id) << (c + 1 < f.dim() ? "," : "\n");
    });
}

void write_csv_file(const std::string& path, const ScalarField& f) {
    std::ofstream os(path);
    if (!os) throw FieldError("cannot open " + path + " for writing");
    write_csv(os, f);
}

void write_csv_file(const std::string& path, const VectorField& f) {
    std::ofstream os(path);
    if (!os) throw FieldError("cannot open " + path + " for writing");
    write_csv(os, f);
}

}  // namespace divsg
