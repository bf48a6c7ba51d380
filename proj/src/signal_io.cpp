#include "bsskit/signal_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "bsskit/error.hpp"
#include "bsskit/experiment.hpp"

namespace bsskit {

namespace {

double parse_double(const std::string& token) {
    double v = 0.0;
    const char* end = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(token.data(), end, v);
    if (ec != std::errc() || ptr != end) throw Error(ErrorCode::IoError, "bad number '" + token + "'");
    return v;
}

long long parse_size(const std::string& token) {
    long long v = 0;
    const char* end = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(token.data(), end, v);
    if (ec != std::errc() || ptr != end || v < 1) throw Error(ErrorCode::IoError, "bad dimension '" + token + "'");
    return v;
}

}  // namespace

void write_matrix(std::ostream& out, const Matrix& m) {
    out << m.rows() << ' ' << m.cols() << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j > 0) out << ' ';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
    if (!out) throw Error(ErrorCode::IoError, "write failed");
}

Matrix read_matrix(std::istream& in) {
    std::string a, b;
    if (!(in >> a >> b)) throw Error(ErrorCode::IoError, "missing 'rows cols' header");
    const auto rows = parse_size(a);
    const auto cols = parse_size(b);
    Matrix m(rows, cols);
    std::string token;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (!(in >> token)) throw Error(ErrorCode::IoError, "file ends before rows x cols values");
            m(i, j) = parse_double(token);
        }
    if (in >> token) throw Error(ErrorCode::IoError, "trailing data after rows x cols values");
    return m;
}

void save_matrix(const std::string& path, const Matrix& m) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
    write_matrix(out, m);
}

Matrix load_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
    return read_matrix(in);
}

}  // namespace bsskit
