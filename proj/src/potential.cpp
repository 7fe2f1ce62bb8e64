#include "mflow/potential.hpp"

#include <algorithm>
#include <sstream>

namespace mflow {

Rational parse_rational(const std::string& text) {
    auto bad = [&] { fail(Err::ParseError, "not a rational: '" + text + "'"); };
    std::string s = text;
    s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
    if (s.empty()) bad();
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        try {
            BigInt num(s.substr(0, slash)), den(s.substr(slash + 1));
            if (den == 0) bad();
            return Rational(num, den);
        } catch (...) {
            bad();
        }
    }
    bool neg = false;
    std::size_t i = 0;
    if (s[0] == '+' || s[0] == '-') {
        neg = s[0] == '-';
        i = 1;
    }
    BigInt num = 0, scale = 1;
    bool seen_digit = false, seen_dot = false;
    for (; i < s.size(); ++i) {
        if (s[i] == '.') {
            if (seen_dot) bad();
            seen_dot = true;
        } else if (s[i] >= '0' && s[i] <= '9') {
            num = num * 10 + (s[i] - '0');
            if (seen_dot) scale *= 10;
            seen_digit = true;
        } else {
            bad();
        }
    }
    if (!seen_digit) bad();
    Rational r(num, scale);
    return neg ? -r : r;
}

std::string rational_str(const Rational& r) {
    std::ostringstream os;
    os << r;
    return os.str();
}

std::vector<std::vector<Vertex>> admissible_windows(const Graph& g, int len) {
    std::vector<std::vector<Vertex>> out;
    std::vector<Vertex> cur;
    auto rec = [&](auto&& self) -> void {
        if (static_cast<int>(cur.size()) == len) {
            out.push_back(cur);
            return;
        }
        if (cur.empty()) {
            for (Vertex v = 0; v < g.size(); ++v) {
                cur.push_back(v);
                self(self);
                cur.pop_back();
            }
        } else {
            for (Vertex w : g.out(cur.back())) {
                cur.push_back(w);
                self(self);
                cur.pop_back();
            }
        }
    };
    rec(rec);
    return out;
}

Potential::Potential(const Graph& g, int lo, int hi,
                     std::map<std::vector<Vertex>, Rational> table, HolderEnvelope env)
    : g_(g), lo_(lo), hi_(hi), table_(std::move(table)), env_(env) {
    require(lo_ <= hi_, Err::ValidationError, "potential window is empty");
    const int len = window_len();
    bool first = true;
    for (const auto& w : admissible_windows(g, len)) {
        auto it = table_.find(w);
        require(it != table_.end(), Err::ValidationError,
                "potential table missing admissible window '" + Word(w, lo_).str(g) + "'");
        if (first || it->second < min_) min_ = it->second;
        if (first || it->second > max_) max_ = it->second;
        first = false;
    }
    for (const auto& [w, v] : table_)
        require(g.word_admissible(w) && static_cast<int>(w.size()) == len, Err::ValidationError,
                "potential table key is not an admissible window");
}

Potential Potential::zero(const Graph& g) { return constant(g, Rational(0)); }

Potential Potential::constant(const Graph& g, const Rational& c) {
    std::map<std::vector<Vertex>, Rational> t;
    for (Vertex v = 0; v < g.size(); ++v) t[{v}] = c;
    return Potential(g, 0, 0, std::move(t));
}

const Rational& Potential::eval_window(std::span<const Vertex> w) const {
    auto it = table_.find(std::vector<Vertex>(w.begin(), w.end()));
    require(it != table_.end(), Err::Inadmissible, "window not in potential table");
    return it->second;
}

Rational Potential::eval(const Point& x, long shift) const {
    std::vector<Vertex> w;
    w.reserve(static_cast<std::size_t>(window_len()));
    for (int i = lo_; i <= hi_; ++i) w.push_back(x.at(shift + i));
    return eval_window(w);
}

Rational Potential::birkhoff(const Point& x, long n) const {
    // n < 0 branch is -f_{|n|}(sigma^{-|n|} x), per the cocycle convention
    Rational s(0);
    if (n > 0)
        for (long j = 0; j < n; ++j) s += eval(x, j);
    else
        for (long j = n; j < 0; ++j) s -= eval(x, j);
    return s;
}

std::optional<Rational> Potential::constant_value() const {
    if (min_ == max_) return min_;
    return std::nullopt;
}

double Potential::variation(int k) const {
    if (-k <= lo_ && hi_ <= k) return 0.0;
    const int a = std::max(lo_, -k), b = std::min(hi_, k);
    if (a > b) return to_double(max_ - min_);
    // group windows by their restriction to the agreeing coordinates [a,b]
    std::map<std::vector<Vertex>, std::pair<Rational, Rational>> ranges;
    for (const auto& [w, v] : table_) {
        std::vector<Vertex> key(w.begin() + (a - lo_), w.begin() + (b - lo_ + 1));
        auto it = ranges.find(key);
        if (it == ranges.end()) ranges.emplace(std::move(key), std::make_pair(v, v));
        else {
            it->second.first = std::min(it->second.first, v);
            it->second.second = std::max(it->second.second, v);
        }
    }
    Rational best(0);
    for (const auto& [k2, mm] : ranges) {
        Rational diff = mm.second - mm.first;
        if (diff > best) best = diff;
    }
    return to_double(best);
}

double Potential::variation_tail(int k0) const {
    double s = 0.0;
    const int kmax = std::max(std::abs(lo_), std::abs(hi_));
    for (int k = k0; k < kmax; ++k) s += variation(k);
    return s;
}

Potential Potential::plus_coboundary(const Potential& u) const {
    // window of f + u o sigma - u: [min(lo_f, lo_u), max(hi_f, hi_u + 1)]
    const int lo = std::min(lo_, u.lo_);
    const int hi = std::max(hi_, u.hi_ + 1);
    std::map<std::vector<Vertex>, Rational> t;
    for (const auto& w : admissible_windows(g_, hi - lo + 1)) {
        auto sub = [&](int a, int b) {
            return std::span<const Vertex>(w.data() + (a - lo), static_cast<std::size_t>(b - a + 1));
        };
        t[w] = eval_window(sub(lo_, hi_)) + u.eval_window(sub(u.lo_ + 1, u.hi_ + 1)) -
               u.eval_window(sub(u.lo_, u.hi_));
    }
    return Potential(g_, lo, hi, std::move(t), env_);
}

Roof::Roof(Potential p, HolderEnvelope env) : pot_(std::move(p)) {
    pot_ = Potential(pot_.graph(), pot_.lo(), pot_.hi(), pot_.table(), env);
    inf_ = pot_.min_value();
    sup_ = pot_.max_value();
    require(inf_ > 0, Err::RoofNotPositive, "roof must be bounded away from zero");
}

} // namespace mflow
