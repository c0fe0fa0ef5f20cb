#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace genf {

/// Dense row-major matrix of doubles. The only tensor type used by the
/// numeric kernel; vectors are 1xN or Nx1 matrices or plain std::vector.
class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

    static Mat from_rows(std::size_t rows, std::size_t cols, std::vector<double> data) {
        if (data.size() != rows * cols)
            throw std::invalid_argument("Mat::from_rows: size mismatch");
        Mat m;
        m.rows_ = rows;
        m.cols_ = cols;
        m.a_ = std::move(data);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return a_.size(); }
    bool empty() const { return a_.empty(); }

    double& operator()(std::size_t i, std::size_t j) {
        assert(i < rows_ && j < cols_);
        return a_[i * cols_ + j];
    }
    double operator()(std::size_t i, std::size_t j) const {
        assert(i < rows_ && j < cols_);
        return a_[i * cols_ + j];
    }
    double& operator[](std::size_t k) { return a_[k]; }
    double operator[](std::size_t k) const { return a_[k]; }

    std::span<double> row(std::size_t i) { return {a_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {a_.data() + i * cols_, cols_}; }

    double* data() { return a_.data(); }
    const double* data() const { return a_.data(); }
    std::vector<double>& vec() { return a_; }
    const std::vector<double>& vec() const { return a_; }

    void fill(double v) { a_.assign(a_.size(), v); }
    void zero() { fill(0.0); }

    bool same_shape(const Mat& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

    Mat& operator+=(const Mat& o) {
        assert(same_shape(o));
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
        return *this;
    }
    Mat& operator-=(const Mat& o) {
        assert(same_shape(o));
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
        return *this;
    }
    Mat& operator*=(double s) {
        for (double& v : a_) v *= s;
        return *this;
    }

    bool has_nan() const {
        for (double v : a_)
            if (std::isnan(v)) return true;
        return false;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> a_;
};

/// c = a * b
inline Mat matmul(const Mat& a, const Mat& b) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("matmul: inner dimensions " + std::to_string(a.cols()) +
                                    " vs " + std::to_string(b.rows()));
    Mat c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* ai = a.data() + i * a.cols();
        double* ci = c.data() + i * c.cols();
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = ai[k];
            if (aik == 0.0) continue;
            const double* bk = b.data() + k * b.cols();
            for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
        }
    }
    return c;
}

/// c += a * b
inline void matmul_acc(Mat& c, const Mat& a, const Mat& b) {
    assert(a.cols() == b.rows() && c.rows() == a.rows() && c.cols() == b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* ai = a.data() + i * a.cols();
        double* ci = c.data() + i * c.cols();
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = ai[k];
            if (aik == 0.0) continue;
            const double* bk = b.data() + k * b.cols();
            for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
        }
    }
}

/// c += a^T * b   (a: n x r, b: n x c, result r x c)
inline void matmul_tn_acc(Mat& c, const Mat& a, const Mat& b) {
    assert(a.rows() == b.rows() && c.rows() == a.cols() && c.cols() == b.cols());
    for (std::size_t k = 0; k < a.rows(); ++k) {
        const double* ak = a.data() + k * a.cols();
        const double* bk = b.data() + k * b.cols();
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double aki = ak[i];
            if (aki == 0.0) continue;
            double* ci = c.data() + i * c.cols();
            for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aki * bk[j];
        }
    }
}

/// c += a * b^T   (a: n x r, b: m x r, result n x m)
inline void matmul_nt_acc(Mat& c, const Mat& a, const Mat& b) {
    assert(a.cols() == b.cols() && c.rows() == a.rows() && c.cols() == b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* ai = a.data() + i * a.cols();
        double* ci = c.data() + i * c.cols();
        for (std::size_t j = 0; j < b.rows(); ++j) {
            const double* bj = b.data() + j * b.cols();
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) s += ai[k] * bj[k];
            ci[j] += s;
        }
    }
}

inline Mat transpose(const Mat& a) {
    Mat t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

inline double l2_norm(std::span<const double> a) {
    return std::sqrt(dot(a, a));
}

} // namespace genf
