/*
 * SPDX-FileCopyrightText: Copyright 2026 The scnn-lab authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

// Pearson correlation and correlation power analysis over aligned windows.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "scnn/error.hpp"
#include "scnn/float_codec.hpp"
#include "scnn/grid.hpp"
#include "scnn/leakage.hpp"
#include "scnn/parallel.hpp"

namespace scnn {

/// Sample Pearson coefficient. Throws UsageError on length mismatch or fewer
/// than two points, UndefinedCorrelation if either side is constant.
template <class A, class B> double pearson(std::span<const A> a, std::span<const B> b) {
    if (a.size() != b.size())
        throw UsageError("pearson: length mismatch");
    if (a.size() < 2)
        throw UsageError("pearson: need at least two points");
    const double n = double(a.size());
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += double(a[i]);
        mb += double(b[i]);
    }
    ma /= n;
    mb /= n;
    double saa = 0, sbb = 0, sab = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = double(a[i]) - ma, db = double(b[i]) - mb;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
    }
    if (saa == 0.0 || sbb == 0.0)
        throw UndefinedCorrelation();
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

inline double pearson(const std::vector<double> &a, const std::vector<double> &b) {
    return pearson<double, double>(a, b);
}

// ---------------------------------------------------------------------------

/// Row-major matrix of aligned samples, one row per observation.
class LeakageMatrix {
  public:
    LeakageMatrix() = default;
    LeakageMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

    double mean() const {
        double s = 0;
        for (double v : data_)
            s += v;
        return data_.empty() ? 0.0 : s / double(data_.size());
    }

    friend bool operator==(const LeakageMatrix &, const LeakageMatrix &) = default;

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

/// Copies samples [offset_i, offset_i + len) of every trace i in `rows`.
inline LeakageMatrix extract_windows(const TraceSet &ts, std::span<const std::size_t> rows,
                                     std::span<const std::size_t> offsets, std::size_t len) {
    if (rows.size() != offsets.size())
        throw UsageError("extract_windows: one offset per row required");
    LeakageMatrix m(rows.size(), len);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto &s = ts.traces.at(rows[r]).samples;
        if (offsets[r] + len > s.size())
            throw UsageError("extract_windows: window outside trace " + std::to_string(rows[r]));
        for (std::size_t c = 0; c < len; ++c)
            m(r, c) = s[offsets[r] + c];
    }
    return m;
}

/// Same offset in every trace.
inline LeakageMatrix extract_windows(const TraceSet &ts, std::size_t offset, std::size_t len) {
    std::vector<std::size_t> rows(ts.size()), offs(ts.size(), offset);
    for (std::size_t i = 0; i < rows.size(); ++i)
        rows[i] = i;
    return extract_windows(ts, rows, offs, len);
}

/// Cuts one trace into equal-length sub-traces starting at `offsets`.
inline LeakageMatrix cut_subtraces(std::span<const float> samples, std::span<const std::size_t> offsets,
                                   std::size_t len) {
    LeakageMatrix m(offsets.size(), len);
    for (std::size_t r = 0; r < offsets.size(); ++r) {
        if (offsets[r] + len > samples.size())
            throw UsageError("cut_subtraces: window outside trace");
        for (std::size_t c = 0; c < len; ++c)
            m(r, c) = samples[offsets[r] + c];
    }
    return m;
}

// ---------------------------------------------------------------------------

/// Candidate values for one CPA run.
class HypothesisSpace {
  public:
    enum class Kind { Grid, Mantissa7, Byte, Explicit };

    static HypothesisSpace grid(const WeightGrid &g) {
        g.validate();
        HypothesisSpace s(Kind::Grid);
        s.grid_ = g;
        s.size_ = g.size();
        return s;
    }
    static HypothesisSpace mantissa7() {
        HypothesisSpace s(Kind::Mantissa7);
        s.size_ = 128;
        return s;
    }
    static HypothesisSpace byte_values() {
        HypothesisSpace s(Kind::Byte);
        s.size_ = 256;
        return s;
    }
    static HypothesisSpace explicit_values(std::vector<double> values) {
        HypothesisSpace s(Kind::Explicit);
        s.values_ = std::move(values);
        s.size_ = s.values_.size();
        return s;
    }

    Kind kind() const { return kind_; }
    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }
    double value(std::size_t i) const {
        switch (kind_) {
        case Kind::Grid:
            return grid_.value(i);
        case Kind::Explicit:
            return values_[i];
        default:
            return double(i);
        }
    }
    const WeightGrid &grid_spec() const { return grid_; }

  private:
    explicit HypothesisSpace(Kind k) : kind_(k) {}
    Kind kind_;
    std::size_t size_ = 0;
    WeightGrid grid_;
    std::vector<double> values_;
};

/// Counts hypothesis evaluations (one per hypothesis per window) for the
/// complexity accounting of a full recovery.
struct HypothesisCounter {
    std::atomic<std::uint64_t> evaluations{0};
    void add(std::uint64_t n) { evaluations.fetch_add(n, std::memory_order_relaxed); }
    std::uint64_t value() const { return evaluations.load(std::memory_order_relaxed); }
};

struct SampleWindow {
    std::size_t begin = 0, end = 0; // [begin, end) columns of the matrix
    std::size_t size() const { return end - begin; }
};

struct CorrelationCurve {
    double hypothesis = 0;
    std::vector<double> rho; // one per window sample
    std::size_t peak_sample = 0;
    double peak = 0; // |rho| at peak_sample
};

struct Candidate {
    double hypothesis = 0;
    double peak = 0; // max |rho| over the window
    std::size_t peak_sample = 0;
    bool informative = true; // false when the prediction had zero variance
};

/// Candidates sorted by peak descending, ties broken by ascending hypothesis.
struct CandidateRanking {
    std::vector<Candidate> ranked;

    bool empty() const { return ranked.empty(); }
    const Candidate &best() const {
        if (ranked.empty())
            throw UsageError("ranking is empty");
        return ranked.front();
    }
    /// 1-based rank of a hypothesis value, 0 if absent.
    std::size_t rank_of(double h) const {
        for (std::size_t i = 0; i < ranked.size(); ++i)
            if (ranked[i].hypothesis == h)
                return i + 1;
        return 0;
    }
    const Candidate *find(double h) const {
        for (const auto &c : ranked)
            if (c.hypothesis == h)
                return &c;
        return nullptr;
    }
    /// Relative lead of rank 1 over the best candidate that `distinct(best,
    /// other)` accepts as a genuine competitor. 1.0 when no competitor exists.
    template <class Distinct> double margin(Distinct &&distinct) const {
        const auto &b = best();
        for (std::size_t i = 1; i < ranked.size(); ++i)
            if (distinct(b.hypothesis, ranked[i].hypothesis))
                return b.peak > 0 ? (b.peak - ranked[i].peak) / b.peak : 0.0;
        return b.peak > 0 ? 1.0 : 0.0;
    }
    double margin() const {
        return margin([](double, double) { return true; });
    }
};

inline void sort_ranking(std::vector<Candidate> &c) {
    std::stable_sort(c.begin(), c.end(), [](const Candidate &a, const Candidate &b) {
        if (a.peak != b.peak)
            return a.peak > b.peak;
        return a.hypothesis < b.hypothesis;
    });
}

struct CpaOptions {
    std::size_t threads = 1;
    std::vector<CorrelationCurve> *curves = nullptr; // filled in hypothesis order when set
    HypothesisCounter *counter = nullptr;
};

namespace detail {

struct ColumnStats {
    std::vector<double> mean, norm; // norm = sqrt(sum of squared deviations)
};

inline ColumnStats column_stats(const LeakageMatrix &m, SampleWindow w) {
    ColumnStats s;
    s.mean.assign(w.size(), 0.0);
    s.norm.assign(w.size(), 0.0);
    const double n = double(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < w.size(); ++c)
            s.mean[c] += m(r, w.begin + c);
    for (auto &v : s.mean)
        v /= n;
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < w.size(); ++c) {
            const double d = m(r, w.begin + c) - s.mean[c];
            s.norm[c] += d * d;
        }
    for (auto &v : s.norm)
        v = std::sqrt(v);
    return s;
}

} // namespace detail

/// Per-hypothesis scores in hypothesis-index order (unsorted).
template <class Predict>
std::vector<Candidate> cpa_scores(const LeakageMatrix &leak, std::span<const float> known,
                                  const HypothesisSpace &space, Predict &&predict, SampleWindow window,
                                  const CpaOptions &opt = {}) {
    if (space.empty())
        throw UsageError("cpa: empty hypothesis space");
    if (window.size() == 0 || window.end > leak.cols())
        throw UsageError("cpa: empty or out-of-range window");
    if (known.size() != leak.rows())
        throw UsageError("cpa: one known operand per trace required");
    if (leak.rows() < 2)
        throw UsageError("cpa: need at least two traces");

    const auto stats = detail::column_stats(leak, window);
    const std::size_t n = leak.rows(), w = window.size();
    std::vector<Candidate> out(space.size());
    if (opt.curves)
        opt.curves->assign(space.size(), {});

    parallel_for(space.size(), opt.threads, [&](std::size_t h) {
        const double hyp = space.value(h);
        std::vector<double> p(n), cov(w, 0.0);
        double mp = 0;
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = double(predict(hyp, known[i]));
            mp += p[i];
        }
        mp /= double(n);
        double sp = 0;
        for (std::size_t i = 0; i < n; ++i) {
            p[i] -= mp;
            sp += p[i] * p[i];
        }
        Candidate c{hyp, 0.0, 0, sp > 0.0};
        std::vector<double> rho(w, 0.0);
        if (c.informative) {
            for (std::size_t i = 0; i < n; ++i) {
                const double pi = p[i];
                if (pi == 0.0)
                    continue;
                const auto row = leak.row(i);
                for (std::size_t k = 0; k < w; ++k)
                    cov[k] += pi * row[window.begin + k];
            }
            const double ns = std::sqrt(sp);
            for (std::size_t k = 0; k < w; ++k) {
                if (stats.norm[k] == 0.0)
                    continue;
                rho[k] = std::clamp(cov[k] / (ns * stats.norm[k]), -1.0, 1.0);
                if (std::abs(rho[k]) > c.peak) {
                    c.peak = std::abs(rho[k]);
                    c.peak_sample = window.begin + k;
                }
            }
        }
        out[h] = c;
        if (opt.curves)
            (*opt.curves)[h] = CorrelationCurve{hyp, std::move(rho), c.peak_sample, c.peak};
    });
    if (opt.counter)
        opt.counter->add(space.size());
    return out;
}

inline CandidateRanking rank(std::vector<Candidate> scores) {
    sort_ranking(scores);
    return CandidateRanking{std::move(scores)};
}

/// Correlates predict(hypothesis, known_i) with every window sample and ranks
/// hypotheses by their peak |rho|.
template <class Predict>
CandidateRanking cpa_byte(const LeakageMatrix &leak, std::span<const float> known, const HypothesisSpace &space,
                          Predict &&predict, SampleWindow window, const CpaOptions &opt = {}) {
    return rank(cpa_scores(leak, known, space, std::forward<Predict>(predict), window, opt));
}

/// Averages per-window peaks hypothesis by hypothesis. All inputs must come
/// from the same space, in hypothesis-index order.
inline std::vector<Candidate> combine_scores(const std::vector<std::vector<Candidate>> &parts) {
    if (parts.empty())
        throw UsageError("combine_scores: nothing to combine");
    std::vector<Candidate> out = parts.front();
    for (std::size_t p = 1; p < parts.size(); ++p) {
        if (parts[p].size() != out.size())
            throw UsageError("combine_scores: spaces differ");
        for (std::size_t h = 0; h < out.size(); ++h) {
            out[h].peak += parts[p][h].peak;
            out[h].informative = out[h].informative || parts[p][h].informative;
        }
    }
    for (auto &c : out)
        c.peak /= double(parts.size());
    return out;
}

// ---------------------------------------------------------------------------
// Absolute-level tie breaking. Pearson ignores offsets, so hypotheses whose
// predictions differ by a constant (a sign bit that never changes, exponent
// bits above the varying ones) tie exactly. The attacker knows the level
// mul_amplitude + HW, and squared error against it separates them.

/// Sum of squared residuals of the level model over one window.
template <class Predict>
double level_sse(const LeakageMatrix &leak, std::span<const float> known, SampleWindow win, double base,
                 Predict &&predict) {
    double sse = 0;
    for (std::size_t r = 0; r < leak.rows(); ++r) {
        const double level = base + predict(known[r]);
        for (std::size_t c = win.begin; c < win.end; ++c) {
            const double d = leak(r, c) - level;
            sse += d * d;
        }
    }
    return sse;
}

/// Reorders the head of a sorted ranking: candidates within `band` of the
/// best peak are ordered by ascending sse(hypothesis).
template <class Sse> void break_ties(std::vector<Candidate> &ranked, double band, Sse &&sse) {
    if (ranked.empty())
        return;
    const double floor = ranked.front().peak * (1.0 - band);
    std::size_t n = 0;
    while (n < ranked.size() && ranked[n].peak >= floor)
        ++n;
    std::vector<std::pair<double, Candidate>> head;
    for (std::size_t i = 0; i < n; ++i)
        head.emplace_back(sse(ranked[i].hypothesis), ranked[i]);
    std::stable_sort(head.begin(), head.end(), [](const auto &a, const auto &b) { return a.first < b.first; });
    for (std::size_t i = 0; i < n; ++i)
        ranked[i] = head[i].second;
}

/// Margin of the rank-1 candidate over the best candidate outside the tie
/// band that break_ties() resolved. 1.0 when no such candidate exists.
inline double band_margin(const std::vector<Candidate> &ranked, double band) {
    if (ranked.empty())
        return 0.0;
    double hi = 0;
    for (const auto &c : ranked)
        hi = std::max(hi, c.peak);
    const double w = ranked.front().peak;
    for (const auto &c : ranked)
        if (c.peak < hi * (1.0 - band))
            return w > 0 ? (w - c.peak) / w : 0.0;
    return w > 0 ? 1.0 : 0.0;
}

// ---------------------------------------------------------------------------
// Leakage predictions for a product m = known * hypothesis.

/// HW of byte `index` of the binary32 product.
inline int predicted_product_hw(float known, float hypothesis, unsigned index) {
    return hamming_weight(storage_byte(known * hypothesis, index));
}

/// Column window holding byte `index` of a product laid out as 4 byte
/// windows of `spb` samples, least significant first.
constexpr SampleWindow byte_window(unsigned index, std::size_t spb) { return {index * spb, (index + 1) * spb}; }

} // namespace scnn
