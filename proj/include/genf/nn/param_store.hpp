#pragma once

#include <cstring>
#include <fstream>
#include <map>
#include <string>

#include "genf/matrix.hpp"
#include "genf/rng.hpp"

namespace genf::nn {

struct Param {
    Mat value;
    Mat grad;
};

/// Flat registry of named trainable arrays with matching gradient slots.
/// Initial values are a pure function of (store seed, param name), so
/// construction order never changes a model.
class ParamStore {
public:
    explicit ParamStore(std::uint64_t seed = 0) : seed_(seed) {}

    Mat& create(const std::string& name, std::size_t rows, std::size_t cols) {
        if (params_.count(name))
            throw std::invalid_argument("ParamStore: duplicate param '" + name + "'");
        Param p;
        p.value = Mat(rows, cols);
        p.grad = Mat(rows, cols);
        return params_.emplace(name, std::move(p)).first->second.value;
    }

    /// uniform(-limit, limit) init, limit chosen by the layer (1/sqrt(d_in)).
    Mat& create_uniform(const std::string& name, std::size_t rows, std::size_t cols,
                        double limit) {
        Mat& v = create(name, rows, cols);
        Rng rng(derive_seed(seed_, "param_init", fnv1a(name)));
        for (std::size_t k = 0; k < v.size(); ++k) v[k] = rng.uniform(-limit, limit);
        return v;
    }

    bool has(const std::string& name) const { return params_.count(name) != 0; }

    Param& at(const std::string& name) {
        auto it = params_.find(name);
        if (it == params_.end())
            throw std::invalid_argument("ParamStore: unknown param '" + name + "'");
        return it->second;
    }
    const Param& at(const std::string& name) const {
        auto it = params_.find(name);
        if (it == params_.end())
            throw std::invalid_argument("ParamStore: unknown param '" + name + "'");
        return it->second;
    }

    const Mat& value(const std::string& name) const { return at(name).value; }
    Mat& value(const std::string& name) { return at(name).value; }
    Mat& grad(const std::string& name) { return at(name).grad; }

    void zero_grads() {
        for (auto& [_, p] : params_) p.grad.zero();
    }

    std::size_t param_count() const {
        std::size_t n = 0;
        for (const auto& [_, p] : params_) n += p.value.size();
        return n;
    }

    std::size_t param_count(const std::string& prefix) const {
        std::size_t n = 0;
        for (const auto& [name, p] : params_)
            if (name.rfind(prefix, 0) == 0) n += p.value.size();
        return n;
    }

    std::uint64_t seed() const { return seed_; }

    auto begin() { return params_.begin(); }
    auto end() { return params_.end(); }
    auto begin() const { return params_.begin(); }
    auto end() const { return params_.end(); }
    std::size_t size() const { return params_.size(); }

    // Versioned binary checkpoint; round-trips bit-exactly.
    void save(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("ParamStore::save: cannot open " + path);
        out.write(kMagic, 8);
        write_u64(out, seed_);
        write_u64(out, params_.size());
        for (const auto& [name, p] : params_) {
            write_u64(out, name.size());
            out.write(name.data(), static_cast<std::streamsize>(name.size()));
            write_u64(out, p.value.rows());
            write_u64(out, p.value.cols());
            out.write(reinterpret_cast<const char*>(p.value.data()),
                      static_cast<std::streamsize>(p.value.size() * sizeof(double)));
        }
        if (!out) throw std::runtime_error("ParamStore::save: write failed for " + path);
    }

    void load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("ParamStore::load: cannot open " + path);
        char magic[8];
        in.read(magic, 8);
        if (!in || std::memcmp(magic, kMagic, 8) != 0)
            throw std::runtime_error("ParamStore::load: bad checkpoint magic in " + path);
        seed_ = read_u64(in);
        const std::uint64_t count = read_u64(in);
        params_.clear();
        for (std::uint64_t i = 0; i < count; ++i) {
            const std::uint64_t name_len = read_u64(in);
            std::string name(name_len, '\0');
            in.read(name.data(), static_cast<std::streamsize>(name_len));
            const std::uint64_t rows = read_u64(in);
            const std::uint64_t cols = read_u64(in);
            Param p;
            p.value = Mat(rows, cols);
            p.grad = Mat(rows, cols);
            in.read(reinterpret_cast<char*>(p.value.data()),
                    static_cast<std::streamsize>(p.value.size() * sizeof(double)));
            if (!in) throw std::runtime_error("ParamStore::load: truncated checkpoint " + path);
            params_.emplace(std::move(name), std::move(p));
        }
    }

private:
    static constexpr const char kMagic[9] = "GENFCK01";

    static void write_u64(std::ofstream& out, std::uint64_t v) {
        out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
    static std::uint64_t read_u64(std::ifstream& in) {
        std::uint64_t v = 0;
        in.read(reinterpret_cast<char*>(&v), sizeof(v));
        return v;
    }

    std::map<std::string, Param> params_; // ordered: deterministic iteration
    std::uint64_t seed_;
};

} // namespace genf::nn
