#include "swingsafe/qp.hpp"

#include "swingsafe/errors.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace swingsafe {
namespace {

constexpr const char* kMagic = "# swingsafe-qp v1";

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_matrix(std::ostream& os, const char* name, const SparseMatrix& a) {
    os << name << ' ' << a.nonZeros() << '\n';
    for (int r = 0; r < a.outerSize(); ++r)
        for (SparseMatrix::InnerIterator it(a, r); it; ++it)
            os << it.row() << ' ' << it.col() << ' ' << fmt(it.value()) << '\n';
}

void write_vector(std::ostream& os, const char* name, const Eigen::VectorXd& v) {
    os << name << '\n';
    for (Eigen::Index i = 0; i < v.size(); ++i) os << fmt(v[i]) << '\n';
}

void write_ints(std::ostream& os, const char* name, const std::vector<int>& v) {
    os << name << ' ' << v.size() << '\n';
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
    os << '\n';
}

class Reader {
public:
    explicit Reader(std::istream& is) : is_(is) {}

    void keyword(const std::string& want) {
        std::string got;
        if (!(is_ >> got) || got != want)
            throw SchemaError("QP dump: expected '" + want + "', found '" + got + "'");
    }
    template <class T>
    T value(const char* what) {
        T v{};
        if (!(is_ >> v)) throw SchemaError(std::string("QP dump: cannot read ") + what);
        return v;
    }
    long count(const char* what, long limit) {
        const long c = value<long>(what);
        if (c < 0 || c > limit) throw SchemaError(std::string("QP dump: bad count for ") + what);
        return c;
    }
    SparseMatrix matrix(const char* name, int rows, int cols) {
        keyword(name);
        const long nnz = count(name, static_cast<long>(rows) * cols);
        std::vector<Triplet> t;
        t.reserve(nnz);
        for (long k = 0; k < nnz; ++k) {
            const long r = value<long>(name), c = value<long>(name);
            const double v = value<double>(name);
            if (r < 0 || r >= rows || c < 0 || c >= cols)
                throw SchemaError(std::string("QP dump: index out of range in ") + name);
            t.emplace_back(static_cast<int>(r), static_cast<int>(c), v);
        }
        SparseMatrix a(rows, cols);
        a.setFromTriplets(t.begin(), t.end());
        a.makeCompressed();
        return a;
    }
    Eigen::VectorXd vector(const char* name, int size) {
        keyword(name);
        Eigen::VectorXd v(size);
        for (int i = 0; i < size; ++i) v[i] = value<double>(name);
        return v;
    }
    std::vector<int> ints(const char* name, long limit) {
        keyword(name);
        const long c = count(name, limit);
        std::vector<int> v(c);
        for (auto& x : v) x = value<int>(name);
        return v;
    }

private:
    std::istream& is_;
};

} // namespace

void write_qp(std::ostream& os, const QpInstance& qp) {
    check_dimensions(qp);
    os << kMagic << '\n';
    os << "dims " << qp.dim() << ' ' << qp.n_ineq() << ' ' << qp.n_eq() << '\n';
    os << "agents " << qp.n_nodes << ' ' << qp.edge_ends.size() << '\n';
    for (auto [p, q] : qp.edge_ends) os << p << ' ' << q << '\n';
    os << "constant " << fmt(qp.constant) << '\n';
    write_matrix(os, "H", qp.H);
    write_vector(os, "f", qp.f);
    write_matrix(os, "R1", qp.R1);
    write_vector(os, "r1", qp.r1);
    write_matrix(os, "R2", qp.R2);
    write_vector(os, "r2", qp.r2);
    write_ints(os, "owner", qp.owner);
    write_ints(os, "ineq_owner", qp.ineq_owner);
    write_ints(os, "eq_owner", qp.eq_owner);
    write_ints(os, "sign_pattern", qp.sign_pattern);
    os << "end\n";
}

void save_qp(const std::string& path, const QpInstance& qp) {
    std::ofstream os(path);
    if (!os) throw Error("cannot write " + path);
    write_qp(os, qp);
}

QpInstance read_qp(std::istream& is) {
    std::string first;
    std::getline(is, first);
    if (first != kMagic) throw SchemaError("QP dump: missing '" + std::string(kMagic) + "' header");
    Reader r(is);
    constexpr long kMax = 50'000'000;
    QpInstance qp;
    r.keyword("dims");
    const int n = static_cast<int>(r.count("dims", kMax));
    const int p = static_cast<int>(r.count("dims", kMax));
    const int q = static_cast<int>(r.count("dims", kMax));
    r.keyword("agents");
    qp.n_nodes = static_cast<int>(r.count("agents", kMax));
    const long edges = r.count("agents", kMax);
    for (long j = 0; j < edges; ++j) {
        const int a = r.value<int>("edge"), b = r.value<int>("edge");
        qp.edge_ends.emplace_back(a, b);
    }
    r.keyword("constant");
    qp.constant = r.value<double>("constant");
    qp.H = r.matrix("H", n, n);
    qp.f = r.vector("f", n);
    qp.R1 = r.matrix("R1", p, n);
    qp.r1 = r.vector("r1", p);
    qp.R2 = r.matrix("R2", q, n);
    qp.r2 = r.vector("r2", q);
    qp.owner = r.ints("owner", kMax);
    qp.ineq_owner = r.ints("ineq_owner", kMax);
    qp.eq_owner = r.ints("eq_owner", kMax);
    qp.sign_pattern = r.ints("sign_pattern", kMax);
    r.keyword("end");
    try {
        check_dimensions(qp);
    } catch (const DimensionMismatch& e) {
        throw SchemaError(std::string("QP dump: ") + e.what());
    }
    return qp;
}

QpInstance load_qp(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw SchemaError("cannot open QP dump " + path);
    return read_qp(is);
}

} // namespace swingsafe
