#include "cgvariants/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace cgv {

namespace {

class LineScanner {
public:
    explicit LineScanner(std::string_view text) : text_(text) {}

    // next non-comment, non-blank line; comments start with '%'
    bool next_data_line(std::string_view& line) {
        while (pos_ < text_.size()) {
            std::size_t end = text_.find('\n', pos_);
            if (end == std::string_view::npos) end = text_.size();
            std::string_view l = text_.substr(pos_, end - pos_);
            pos_ = end + 1;
            while (!l.empty() && (l.back() == '\r' || l.back() == ' ' || l.back() == '\t'))
                l.remove_suffix(1);
            while (!l.empty() && (l.front() == ' ' || l.front() == '\t')) l.remove_prefix(1);
            if (l.empty() || l.front() == '%') continue;
            line = l;
            return true;
        }
        return false;
    }

    bool first_line(std::string_view& line) {
        std::size_t end = text_.find('\n', 0);
        if (end == std::string_view::npos) end = text_.size();
        line = text_.substr(0, end);
        pos_ = end + 1;
        return !line.empty();
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        std::size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
        if (j > i) out.emplace_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

bool parse_index(std::string_view tok, Index& out) {
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return ec == std::errc() && p == tok.data() + tok.size();
}

bool parse_real(std::string_view tok, double& out) {
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    if (ec == std::errc() && p == tok.data() + tok.size()) return true;
    // Fortran-style exponents (1.0D+02)
    std::string fixed(tok);
    for (char& c : fixed)
        if (c == 'D' || c == 'd') c = 'e';
    auto [p2, ec2] = std::from_chars(fixed.data(), fixed.data() + fixed.size(), out);
    return ec2 == std::errc() && p2 == fixed.data() + fixed.size();
}

struct Header {
    bool coordinate = false;
    bool symmetric = false;
};

Header parse_header(std::string_view line) {
    const auto tokens = split_ws(line);
    if (tokens.size() < 5 || lower(tokens[0]) != "%%matrixmarket")
        throw ParseError(ParseError::Code::MalformedHeader,
                         "missing %%MatrixMarket header line");
    if (lower(tokens[1]) != "matrix")
        throw ParseError(ParseError::Code::MalformedHeader, "object must be 'matrix'");
    const std::string format = lower(tokens[2]);
    const std::string field = lower(tokens[3]);
    const std::string symmetry = lower(tokens[4]);

    Header h;
    if (format == "coordinate")
        h.coordinate = true;
    else if (format == "array")
        h.coordinate = false;
    else
        throw ParseError(ParseError::Code::MalformedHeader, "unknown format '" + format + "'");

    if (field == "pattern")
        throw ParseError(ParseError::Code::PatternField, "pattern-only input has no values");
    if (field != "real")
        throw ParseError(ParseError::Code::NonRealField, "field '" + field + "' is not real");

    if (symmetry == "symmetric")
        h.symmetric = true;
    else if (symmetry == "general")
        h.symmetric = false;
    else
        throw ParseError(ParseError::Code::UnsupportedSymmetry,
                         "unsupported symmetry '" + symmetry + "'");
    return h;
}

} // namespace

SparseMatrix parse_matrix_market(std::string_view text) {
    LineScanner scanner(text);
    std::string_view line;
    if (!scanner.first_line(line))
        throw ParseError(ParseError::Code::MalformedHeader, "empty input");
    const Header header = parse_header(line);

    if (!scanner.next_data_line(line))
        throw ParseError(ParseError::Code::Malformed, "missing size line");
    const auto size_tokens = split_ws(line);

    std::vector<Triplet> triplets;
    Index rows = 0;
    Index cols = 0;

    if (header.coordinate) {
        Index declared_nnz = 0;
        if (size_tokens.size() != 3 || !parse_index(size_tokens[0], rows) ||
            !parse_index(size_tokens[1], cols) || !parse_index(size_tokens[2], declared_nnz))
            throw ParseError(ParseError::Code::Malformed, "bad coordinate size line");
        if (rows != cols)
            throw ParseError(ParseError::Code::NotSquare, "matrix is not square");
        triplets.reserve(static_cast<std::size_t>(declared_nnz) * (header.symmetric ? 2 : 1));
        for (Index e = 0; e < declared_nnz; ++e) {
            if (!scanner.next_data_line(line))
                throw ParseError(ParseError::Code::Malformed, "fewer entries than declared");
            const auto toks = split_ws(line);
            Index i = 0;
            Index j = 0;
            double v = 0.0;
            if (toks.size() != 3 || !parse_index(toks[0], i) || !parse_index(toks[1], j) ||
                !parse_real(toks[2], v))
                throw ParseError(ParseError::Code::Malformed, "bad coordinate entry");
            if (i < 1 || i > rows || j < 1 || j > cols)
                throw ParseError(ParseError::Code::IndexOutOfBounds,
                                 "entry index outside declared bounds");
            triplets.emplace_back(i - 1, j - 1, v);
            if (header.symmetric && i != j) triplets.emplace_back(j - 1, i - 1, v);
        }
    } else {
        if (size_tokens.size() != 2 || !parse_index(size_tokens[0], rows) ||
            !parse_index(size_tokens[1], cols))
            throw ParseError(ParseError::Code::Malformed, "bad array size line");
        if (rows != cols)
            throw ParseError(ParseError::Code::NotSquare, "matrix is not square");
        // column-major; symmetric array stores the lower triangle per column
        std::vector<double> vals;
        const std::size_t expected =
            header.symmetric
                ? static_cast<std::size_t>(rows) * (rows + 1) / 2
                : static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
        vals.reserve(expected);
        while (scanner.next_data_line(line)) {
            for (const auto& tok : split_ws(line)) {
                double v = 0.0;
                if (!parse_real(tok, v))
                    throw ParseError(ParseError::Code::Malformed, "bad array value");
                vals.push_back(v);
            }
        }
        if (vals.size() != expected)
            throw ParseError(ParseError::Code::Malformed, "array value count does not match size");
        std::size_t idx = 0;
        triplets.reserve(static_cast<std::size_t>(rows) * cols);
        for (Index j = 0; j < cols; ++j) {
            for (Index i = header.symmetric ? j : 0; i < rows; ++i) {
                const double v = vals[idx++];
                triplets.emplace_back(i, j, v);
                if (header.symmetric && i != j) triplets.emplace_back(j, i, v);
            }
        }
    }

    SparseMatrix a = csr_from_triplets(rows, std::move(triplets));
    validate_csr(a);
    if (!is_symmetric(a))
        throw ParseError(ParseError::Code::NotSymmetric, "stored matrix is not symmetric");
    return a;
}

SparseMatrix read_matrix_market_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_matrix_market(buf.str());
}

std::string write_matrix_market(const SparseMatrix& a) {
    std::string out = "%%MatrixMarket matrix coordinate real general\n";
    out += std::to_string(a.n) + " " + std::to_string(a.n) + " " + std::to_string(a.nnz()) + "\n";
    char buf[96];
    for (Index i = 0; i < a.n; ++i) {
        for (Index k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
            std::snprintf(buf, sizeof(buf), "%lld %lld %.17g\n",
                          static_cast<long long>(i + 1), static_cast<long long>(a.col_idx[k] + 1),
                          a.values[k]);
            out += buf;
        }
    }
    return out;
}

} // namespace cgv
