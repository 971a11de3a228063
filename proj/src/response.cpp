// SPDX-License-Identifier: Apache-2.0
#include "rmtimg/response.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <ostream>

namespace rmtimg {

namespace {

void check_inclusions(const std::vector<Inclusion>& inclusions) {
    if (inclusions.empty())
        throw parameter_error("forward_response: inclusion list is empty");
    for (std::size_t p = 0; p < inclusions.size(); ++p) {
        if (inclusions[p].center[2] == 0.0)
            throw parameter_error("forward_response: inclusion lies in the array plane");
        for (std::size_t q = p + 1; q < inclusions.size(); ++q)
            if ((inclusions[p].center - inclusions[q].center).norm() == 0.0)
                throw parameter_error("forward_response: inclusion centers must be distinct");
    }
}

// Stacked M x 3P Green's factor and block-diagonal 3P x 3P reflectivity.
MatXc stacked_greens(const ArrayGeometry& geom, const std::vector<Inclusion>& inc,
                     const SensingMatrix& sensing, double k, GreensKind kind) {
    const int p = int(inc.size());
    MatXc a(std::int64_t(sensing.size()) * geom.sensor_count(), 3 * p);
    for (int j = 0; j < p; ++j)
        a.middleCols(3 * j, 3) = greens_column(geom, inc[j].center, sensing, k, kind);
    return a;
}

}  // namespace

ResponseMatrix forward_response(const ArrayGeometry& geom,
                                const std::vector<Inclusion>& inclusions,
                                const SensingMatrix& sensing, double k,
                                GreensKind kind) {
    check_inclusions(inclusions);
    const std::int64_t m = std::int64_t(sensing.size()) * geom.sensor_count();
    ResponseMatrix r{MatXc::Zero(m, m), sensing, false};
    for (const auto& inc : inclusions) {
        const MatXc g = greens_column(geom, inc.center, sensing, k, kind);
        const MatXc grho = g * inc.reflectivity.cast<cxd>();
        r.data.noalias() += grho * g.transpose();
    }
    return r;
}

NoiselessSvd noiseless_svd(const ArrayGeometry& geom,
                           const std::vector<Inclusion>& inclusions,
                           const SensingMatrix& sensing, double k, GreensKind kind) {
    check_inclusions(inclusions);
    const int p = int(inclusions.size());
    const MatXc a = stacked_greens(geom, inclusions, sensing, k, kind);
    Eigen::HouseholderQR<MatXc> qr(a);
    const MatXc q = qr.householderQ() * MatXc::Identity(a.rows(), 3 * p);
    const MatXc r = qr.matrixQR().topRows(3 * p).triangularView<Eigen::Upper>();
    MatXc core = MatXc::Zero(3 * p, 3 * p);
    for (int j = 0; j < p; ++j)
        core.block(3 * j, 3 * j, 3, 3) = inclusions[j].reflectivity.cast<cxd>();
    Eigen::JacobiSVD<MatXc> svd(r * core * r.transpose(), Eigen::ComputeFullU);
    return NoiselessSvd{svd.singularValues(), q * svd.matrixU()};
}

VecX noiseless_spectrum(const ArrayGeometry& geom,
                        const std::vector<Inclusion>& inclusions,
                        const SensingMatrix& sensing, double k, GreensKind kind) {
    check_inclusions(inclusions);
    const int p = int(inclusions.size());
    const MatXc a = stacked_greens(geom, inclusions, sensing, k, kind);
    Eigen::HouseholderQR<MatXc> qr(a);
    const MatXc r = qr.matrixQR().topRows(3 * p).triangularView<Eigen::Upper>();
    MatXc core = MatXc::Zero(3 * p, 3 * p);
    for (int j = 0; j < p; ++j)
        core.block(3 * j, 3 * j, 3, 3) = inclusions[j].reflectivity.cast<cxd>();
    Eigen::JacobiSVD<MatXc> svd(r * core * r.transpose());
    return svd.singularValues();
}

namespace {
constexpr char kMagic[8] = {'R', 'M', 'T', 'R', 'E', 'S', 'P', '1'};
}

void save_response(const ResponseMatrix& r, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw parameter_error("save_response: cannot open " + path);
    os.write(kMagic, 8);
    const std::uint64_t m = std::uint64_t(r.dim());
    const std::uint8_t noisy = r.noisy ? 1 : 0;
    const std::uint8_t ns = std::uint8_t(r.sensing.size());
    std::uint8_t comps[3] = {0, 0, 0};
    for (int c = 0; c < r.sensing.size(); ++c)
        comps[c] = std::uint8_t(r.sensing.components()[c]);
    os.write(reinterpret_cast<const char*>(&m), 8);
    os.write(reinterpret_cast<const char*>(&noisy), 1);
    os.write(reinterpret_cast<const char*>(&ns), 1);
    os.write(reinterpret_cast<const char*>(comps), 3);
    // row-major interleaved re/im
    std::vector<double> row(2 * r.dim());
    for (int i = 0; i < r.dim(); ++i) {
        for (int j = 0; j < r.dim(); ++j) {
            row[2 * j] = r.data(i, j).real();
            row[2 * j + 1] = r.data(i, j).imag();
        }
        os.write(reinterpret_cast<const char*>(row.data()),
                 std::streamsize(row.size() * sizeof(double)));
    }
    if (!os) throw numerical_error("save_response: write failed for " + path);
}

ResponseMatrix load_response(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw parameter_error("load_response: cannot open " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kMagic, 8) != 0)
        throw parameter_error("load_response: bad magic in " + path);
    std::uint64_t m = 0;
    std::uint8_t noisy = 0, ns = 0, comps[3];
    is.read(reinterpret_cast<char*>(&m), 8);
    is.read(reinterpret_cast<char*>(&noisy), 1);
    is.read(reinterpret_cast<char*>(&ns), 1);
    is.read(reinterpret_cast<char*>(comps), 3);
    if (!is || ns < 1 || ns > 3)
        throw parameter_error("load_response: corrupt header in " + path);
    std::vector<int> cset(comps, comps + ns);
    ResponseMatrix r{MatXc(m, m), SensingMatrix(cset), noisy != 0};
    std::vector<double> row(2 * m);
    for (std::uint64_t i = 0; i < m; ++i) {
        is.read(reinterpret_cast<char*>(row.data()),
                std::streamsize(row.size() * sizeof(double)));
        if (!is) throw parameter_error("load_response: truncated data in " + path);
        for (std::uint64_t j = 0; j < m; ++j)
            r.data(i, j) = cxd(row[2 * j], row[2 * j + 1]);
    }
    return r;
}

void write_response_csv(const ResponseMatrix& r, std::ostream& os) {
    os << "row,col,re,im\n";
    os.precision(17);
    for (int i = 0; i < r.dim(); ++i)
        for (int j = 0; j < r.dim(); ++j)
            os << i << ',' << j << ',' << r.data(i, j).real() << ','
               << r.data(i, j).imag() << '\n';
}

}  // namespace rmtimg
