#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <stdexcept>
#include <string>
#include <vector>

namespace wb {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a requested lift/preimage does not exist.
struct LiftFailure : Error {
    explicit LiftFailure(const std::string& what) : Error(what) {}
};

// Raised when a map fails a well-definedness check.
struct NotWellDefined : Error {
    explicit NotWellDefined(const std::string& what) : Error(what) {}
};

// Raised when a group that must be finitely generated is not.
struct NotFinitelyGenerated : Error {
    explicit NotFinitelyGenerated(const std::string& what) : Error(what) {}
};

// Raised when an extension problem is posed with a non-divisible target.
struct NotDivisibleTarget : Error {
    explicit NotDivisibleTarget(const std::string& what) : Error(what) {}
};

// Raised when an element expected to be a cycle is not.
struct NotACycle : Error {
    explicit NotACycle(const std::string& what) : Error(what) {}
};

// Raised when a degreewise-free complex is required but not supplied.
struct NotFree : Error {
    explicit NotFree(const std::string& what) : Error(what) {}
};

template <class T>
class Matrix {
public:
    Matrix() : rows_(0), cols_(0) {}
    Matrix(size_t r, size_t c) : rows_(r), cols_(c), a_(r * c) {}
    Matrix(size_t r, size_t c, std::vector<T> data)
        : rows_(r), cols_(c), a_(std::move(data)) {
        if (a_.size() != rows_ * cols_) throw Error("matrix: bad data size");
    }

    static Matrix identity(size_t n) {
        Matrix m(n, n);
        for (size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }
    static Matrix zero(size_t r, size_t c) { return Matrix(r, c); }

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }

    T& operator()(size_t i, size_t j) { return a_[i * cols_ + j]; }
    const T& operator()(size_t i, size_t j) const { return a_[i * cols_ + j]; }

    bool operator==(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
    }

    Matrix operator*(const Matrix& o) const {
        if (cols_ != o.rows_) throw Error("matrix: dim mismatch in product");
        Matrix out(rows_, o.cols_);
        for (size_t i = 0; i < rows_; ++i)
            for (size_t k = 0; k < cols_; ++k) {
                const T& v = (*this)(i, k);
                if (v == 0) continue;
                for (size_t j = 0; j < o.cols_; ++j)
                    out(i, j) += v * o(k, j);
            }
        return out;
    }

    Matrix operator+(const Matrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw Error("matrix: dim mismatch in sum");
        Matrix out(rows_, cols_);
        for (size_t i = 0; i < a_.size(); ++i) out.a_[i] = a_[i] + o.a_[i];
        return out;
    }

    Matrix operator-(const Matrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw Error("matrix: dim mismatch in difference");
        Matrix out(rows_, cols_);
        for (size_t i = 0; i < a_.size(); ++i) out.a_[i] = a_[i] - o.a_[i];
        return out;
    }

    Matrix operator-() const {
        Matrix out(rows_, cols_);
        for (size_t i = 0; i < a_.size(); ++i) out.a_[i] = -a_[i];
        return out;
    }

    Matrix transpose() const {
        Matrix out(cols_, rows_);
        for (size_t i = 0; i < rows_; ++i)
            for (size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
        return out;
    }

    std::vector<T> col(size_t j) const {
        std::vector<T> v(rows_);
        for (size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
        return v;
    }

    void set_col(size_t j, const std::vector<T>& v) {
        if (v.size() != rows_) throw Error("matrix: bad column size");
        for (size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
    }

    std::vector<T> apply(const std::vector<T>& x) const {
        if (x.size() != cols_) throw Error("matrix: dim mismatch in apply");
        std::vector<T> y(rows_);
        for (size_t i = 0; i < rows_; ++i) {
            T acc = 0;
            for (size_t j = 0; j < cols_; ++j)
                if ((*this)(i, j) != 0) acc += (*this)(i, j) * x[j];
            y[i] = acc;
        }
        return y;
    }

    bool is_zero() const {
        for (const auto& v : a_)
            if (v != 0) return false;
        return true;
    }

    // Concatenate columns: [*this | o].
    Matrix hcat(const Matrix& o) const {
        if (rows_ != o.rows_) throw Error("matrix: hcat row mismatch");
        Matrix out(rows_, cols_ + o.cols_);
        for (size_t i = 0; i < rows_; ++i) {
            for (size_t j = 0; j < cols_; ++j) out(i, j) = (*this)(i, j);
            for (size_t j = 0; j < o.cols_; ++j) out(i, cols_ + j) = o(i, j);
        }
        return out;
    }

    // Stack rows: [*this ; o].
    Matrix vcat(const Matrix& o) const {
        if (cols_ != o.cols_) throw Error("matrix: vcat col mismatch");
        Matrix out(rows_ + o.rows_, cols_);
        for (size_t i = 0; i < rows_; ++i)
            for (size_t j = 0; j < cols_; ++j) out(i, j) = (*this)(i, j);
        for (size_t i = 0; i < o.rows_; ++i)
            for (size_t j = 0; j < cols_; ++j) out(rows_ + i, j) = o(i, j);
        return out;
    }

    Matrix submatrix(size_t r0, size_t r1, size_t c0, size_t c1) const {
        if (r1 < r0 || c1 < c0 || r1 > rows_ || c1 > cols_)
            throw Error("matrix: bad submatrix range");
        Matrix out(r1 - r0, c1 - c0);
        for (size_t i = r0; i < r1; ++i)
            for (size_t j = c0; j < c1; ++j) out(i - r0, j - c0) = (*this)(i, j);
        return out;
    }

private:
    size_t rows_, cols_;
    std::vector<T> a_;
};

using IntMatrix = Matrix<Int>;
using RatMatrix = Matrix<Rat>;

RatMatrix to_rational(const IntMatrix& m);
// Fails if any entry has a denominator.
IntMatrix to_integral(const RatMatrix& m);
std::vector<Rat> to_rational(const std::vector<Int>& v);
std::vector<Int> to_integral(const std::vector<Rat>& v);

Int lcm_of_denominators(const RatMatrix& m);

// Basis of the rational null space {x : m x = 0}, as matrix columns.
RatMatrix rational_nullspace(const RatMatrix& m);

// One solution of m x = b over Q, with free variables set to zero.
// Returns false if the system is inconsistent.
bool rational_solve(const RatMatrix& m, const std::vector<Rat>& b,
                    std::vector<Rat>& out);

// Rank over Q.
size_t rational_rank(const RatMatrix& m);

// Smith normal form: u * a * v = d with u, v unimodular and d diagonal,
// d(i,i) = s_i >= 0 and s_i | s_{i+1}.  Pivot selection: smallest nonzero
// absolute value, ties broken by lowest (row, col).
struct SmithForm {
    IntMatrix u, v, d;
    IntMatrix uinv, vinv;
    size_t rank = 0;  // number of nonzero diagonal entries
    std::vector<Int> diag() const {
        std::vector<Int> out(rank);
        for (size_t i = 0; i < rank; ++i) out[i] = d(i, i);
        return out;
    }
};

SmithForm smith_normal_form(const IntMatrix& a);

// One integer solution of a x = b, free variables set to zero.
bool integer_solve(const IntMatrix& a, const std::vector<Int>& b,
                   std::vector<Int>& out);

// Basis of the integer null space {x in Z^n : a x = 0}, as matrix columns.
IntMatrix integer_nullspace(const IntMatrix& a);

// Basis of the column lattice {a x : x in Z^n}, as matrix columns
// (full column rank).
IntMatrix lattice_column_basis(const IntMatrix& a);

}  // namespace wb
