#include "mflow/onesided.hpp"

#include <algorithm>
#include <optional>

namespace mflow {

OneSidedReduction reduce_to_one_sided(const Potential& f) {
    const Graph& g = f.graph();
    if (f.one_sided()) return {f, Potential::zero(g)};

    const int l = f.lo(), m = f.hi();
    const long K = -l; // terms k = 0..K-1 survive in the fixed-past sum

    // h lives on coordinates [l, m - l - 1]
    const int h_lo = l, h_hi = m - l - 1 >= l ? m - l - 1 : l;
    std::map<std::vector<Vertex>, Rational> h_table;
    for (const auto& w : admissible_windows(g, h_hi - h_lo + 1)) {
        Point x = Point::through(g, Word(w, h_lo));
        // fixed-past modification: canonical past glued at coordinate 0
        Point xhat = Point::through(g, x.window(0, h_hi + 1));
        Rational s(0);
        for (long k = 0; k < K; ++k) s += f.eval(x, k) - f.eval(xhat, k);
        h_table[w] = s;
    }
    Potential h(g, h_lo, h_hi, std::move(h_table));

    // f^s on [l, m-l], then projected onto [0, m-l]
    const int s_lo = l, s_hi = m - l;
    std::map<std::vector<Vertex>, Rational> proj;
    for (const auto& w : admissible_windows(g, s_hi - s_lo + 1)) {
        Point x = Point::through(g, Word(w, s_lo));
        Rational v = f.eval(x) - h.eval(x) + h.eval(x, 1);
        std::vector<Vertex> key(w.begin() + (0 - s_lo), w.end());
        auto it = proj.find(key);
        if (it == proj.end()) proj.emplace(std::move(key), v);
        else
            require(it->second == v, Err::ValidationError,
                    "one-sided reduction failed to erase the past");
    }
    Potential fs(g, 0, s_hi, std::move(proj), f.envelope());
    return {fs, h};
}

ReturnWordSystem recode_return_words(const Graph& g, const Potential& roof, const Word& base_word,
                                     int cap) {
    require(base_word.admissible(g), Err::Inadmissible, "base word inadmissible");
    require(roof.one_sided(), Err::ValidationError,
            "recode_return_words expects a one-sided roof; reduce first");
    require(cap >= 1, Err::ValidationError, "cap must be >= 1");
    const auto& a = base_word.symbols;
    const long alen = base_word.size();

    // DFS over admissible extensions s of the base word; when the base word
    // reappears at position p >= 1, s[0..p) is a first-return word.
    std::vector<std::vector<Vertex>> words;
    bool truncated = false;
    std::vector<Vertex> s(a.begin(), a.end());
    auto ends_with_a = [&](long p) {
        if (p < 1 || p + alen != static_cast<long>(s.size())) return false;
        return std::equal(a.begin(), a.end(), s.begin() + p);
    };
    auto dfs = [&](auto&& self) -> void {
        const long p = static_cast<long>(s.size()) - alen;
        if (ends_with_a(p)) {
            words.emplace_back(s.begin(), s.begin() + p);
            return;
        }
        if (p >= cap) {
            truncated = true;
            return;
        }
        for (Vertex b : g.out(s.back())) {
            s.push_back(b);
            self(self);
            s.pop_back();
        }
    };
    dfs(dfs);
    require(!words.empty(), Err::CapExceeded,
            "no first return to the base word within cap " + std::to_string(cap));
    std::sort(words.begin(), words.end());

    std::vector<std::string> names;
    for (const auto& w : words) {
        std::string nm;
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (i) nm += '.';
            nm += g.name(w[i]);
        }
        names.push_back(nm);
    }
    std::vector<std::pair<std::string, std::string>> edges;
    for (const auto& u : names)
        for (const auto& v : names) edges.emplace_back(u, v);
    Graph induced = Graph::validate(names, edges);

    // induced roof on (state, next state): Birkhoff sum over the excursion,
    // read off w . w' . a, which determines all coordinates the roof needs
    std::map<std::vector<Vertex>, Rational> rt;
    bool depends_on_next = false;
    const long lookahead = roof.hi();
    for (std::size_t i = 0; i < words.size(); ++i) {
        Rational first_val;
        for (std::size_t j = 0; j < words.size(); ++j) {
            require(lookahead <= static_cast<long>(words[j].size()) + alen, Err::CapExceeded,
                    "roof memory exceeds the return-word lookahead");
            std::vector<Vertex> concat = words[i];
            concat.insert(concat.end(), words[j].begin(), words[j].end());
            concat.insert(concat.end(), a.begin(), a.end());
            Point x = Point::through(g, Word(concat, 0));
            Rational val(0);
            for (long k = 0; k < static_cast<long>(words[i].size()); ++k) val += roof.eval(x, k);
            rt[{static_cast<Vertex>(i), static_cast<Vertex>(j)}] = val;
            if (j == 0) first_val = val;
            else if (val != first_val) depends_on_next = true;
        }
    }
    Potential induced_roof = [&] {
        if (!depends_on_next) {
            std::map<std::vector<Vertex>, Rational> t0;
            for (std::size_t i = 0; i < words.size(); ++i)
                t0[{static_cast<Vertex>(i)}] = rt[{static_cast<Vertex>(i), 0}];
            return Potential(induced, 0, 0, std::move(t0), roof.envelope());
        }
        return Potential(induced, 0, 1, std::move(rt), roof.envelope());
    }();

    std::vector<long> times;
    for (const auto& w : words) times.push_back(static_cast<long>(w.size()));
    return {std::move(induced), std::move(induced_roof), std::move(words), std::move(times),
            truncated};
}

PositiveReduction make_positive_one_sided(const Graph& g, const Potential& roof, int cap) {
    auto red = reduce_to_one_sided(roof);
    if (red.one_sided.min_value() > 0) return {g, Roof(red.one_sided), false, 0};

    // Not positive: boost the return time so that sup h < n0 inf(r)/2; the
    // recoded roof is the Birkhoff sum (r^s)_phi = r_phi - h + h o sigma^phi
    // and r_phi > n0 inf(r) > 2 sup h keeps it positive.
    const Rational inf_r = roof.min_value();
    require(inf_r > 0, Err::RoofNotPositive, "original roof must be positive");
    const Rational sup_h = std::max(abs(red.transfer.max_value()), abs(red.transfer.min_value()));
    long n0 = 1;
    while (Rational(n0) * inf_r <= 2 * sup_h) ++n0;
    const int rcap = std::max<int>(cap, static_cast<int>(n0) + 3);

    // pick a base word whose first returns all exceed n0; the induced
    // alphabet is the finite truncation at the cap
    for (int len = 1; len <= cap; ++len) {
        for (const auto& w : admissible_windows(g, len)) {
            std::optional<ReturnWordSystem> rws;
            try {
                rws = recode_return_words(g, red.one_sided, Word(w, 0), rcap);
            } catch (const Error&) {
                continue;
            }
            long min_ret = *std::min_element(rws->return_times.begin(), rws->return_times.end());
            if (min_ret <= n0) continue;
            if (rws->induced.size() < 2) continue;
            if (!(rws->induced_roof.min_value() > 0)) continue;
            return {rws->induced, Roof(rws->induced_roof), true, n0};
        }
    }
    fail(Err::CapExceeded, "no base word with first returns > " + std::to_string(n0) +
                               " within cap " + std::to_string(cap));
}

} // namespace mflow
