#include "risitl/dbm.hpp"

#include <stdexcept>

namespace risitl {

std::string DbmBound::str() const {
    if (inf) return "inf";
    return (strict ? "<" : "<=") + std::to_string(value);
}

Dbm::Dbm(int clocks) : n_(clocks + 1), m_(static_cast<size_t>(n_ * n_)) {
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) ref(i, j) = i == j ? DbmBound::le(0) : DbmBound::infinite();
    for (int i = 1; i < n_; ++i) ref(0, i) = DbmBound::le(0);  // clocks >= 0
}

Dbm Dbm::zero(int clocks) {
    Dbm d(clocks);
    for (int i = 0; i < d.n_; ++i)
        for (int j = 0; j < d.n_; ++j) d.ref(i, j) = DbmBound::le(0);
    return d;
}

Dbm Dbm::unconstrained(int clocks) { return Dbm(clocks); }

bool Dbm::empty() const {
    for (int i = 0; i < n_; ++i)
        if (at(i, i) < DbmBound::le(0)) return true;
    return false;
}

void Dbm::close() {
    for (int k = 0; k < n_; ++k)
        for (int i = 0; i < n_; ++i) {
            if (at(i, k).inf) continue;
            for (int j = 0; j < n_; ++j) {
                DbmBound cand = at(i, k) + at(k, j);
                if (cand < at(i, j)) ref(i, j) = cand;
            }
        }
}

bool Dbm::constrain(int i, int j, const DbmBound& b) {
    if (b.inf) return !empty();
    if (b < at(i, j)) {
        ref(i, j) = b;
        for (int p = 0; p < n_; ++p) {
            if (at(p, i).inf) continue;
            DbmBound pi_b = at(p, i) + b;
            for (int q = 0; q < n_; ++q) {
                if (at(j, q).inf) continue;
                DbmBound cand = pi_b + at(j, q);
                if (cand < at(p, q)) ref(p, q) = cand;
            }
        }
    }
    return !empty();
}

void Dbm::up() {
    for (int i = 1; i < n_; ++i) ref(i, 0) = DbmBound::infinite();
}

void Dbm::reset(int clock) {
    int c = clock + 1;
    for (int j = 0; j < n_; ++j) {
        ref(c, j) = at(0, j);
        ref(j, c) = at(j, 0);
    }
    ref(c, c) = DbmBound::le(0);
}

void Dbm::free_clock(int clock) {
    int c = clock + 1;
    for (int j = 0; j < n_; ++j) {
        if (j == c) continue;
        ref(c, j) = DbmBound::infinite();
        ref(j, c) = j == 0 ? DbmBound::le(0) : at(j, 0);
    }
    close();
}

bool Dbm::includes(const Dbm& other) const {
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            if (at(i, j) < other.at(i, j)) return false;
    return true;
}

bool Dbm::operator==(const Dbm& o) const {
    if (n_ != o.n_) return false;
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            if (!(at(i, j) == o.at(i, j))) return false;
    return true;
}

void Dbm::extrapolate(const std::vector<std::int64_t>& max_const) {
    if (static_cast<int>(max_const.size()) != n_ - 1)
        throw std::invalid_argument("extrapolate: one max constant per clock required");
    for (int i = 1; i < n_; ++i) {
        std::int64_t mi = max_const[static_cast<size_t>(i - 1)];
        for (int j = 0; j < n_; ++j) {
            if (i == j) continue;
            if (!at(i, j).inf && at(i, j).value > mi) ref(i, j) = DbmBound::infinite();
        }
        if (!at(0, i).inf && at(0, i).value < -mi) ref(0, i) = DbmBound::lt(-mi);
        for (int j = 1; j < n_; ++j) {
            std::int64_t mj = max_const[static_cast<size_t>(j - 1)];
            if (j == i) continue;
            if (!at(i, j).inf && at(i, j).value < -mj) ref(i, j) = DbmBound::lt(-mj);
        }
    }
    close();
}

std::string Dbm::str() const {
    std::string s;
    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) s += at(i, j).str() + " ";
        s += "\n";
    }
    return s;
}

}  // namespace risitl
