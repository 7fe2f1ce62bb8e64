#include "mflow/point.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mflow {

std::string Word::str(const Graph& g) const {
    std::string s;
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        if (i) s += ',';
        s += g.name(symbols[i]);
    }
    return s;
}

Word parse_word(const Graph& g, const std::string& text, long anchor) {
    std::vector<Vertex> syms;
    std::string cur;
    auto flush = [&] {
        require(!cur.empty(), Err::ParseError, "empty symbol in word '" + text + "'");
        syms.push_back(g.id(cur));
        cur.clear();
    };
    for (char c : text) {
        if (c == ',') flush();
        else if (c != ' ') cur += c;
    }
    if (!cur.empty()) flush();
    require(!syms.empty(), Err::ParseError, "empty word");
    return Word(std::move(syms), anchor);
}

static long mod(long a, long m) {
    long r = a % m;
    return r < 0 ? r + m : r;
}

Point::Point(const Graph& g, std::vector<Vertex> past_cycle, Word core,
             std::vector<Vertex> future_cycle)
    : g_(g), past_(std::move(past_cycle)), future_(std::move(future_cycle)), core_(std::move(core)) {
    require(!past_.empty() && !future_.empty(), Err::BadWord, "point cycles must be nonempty");
    require(g.cycle_admissible(past_), Err::Inadmissible, "past cycle inadmissible");
    require(g.cycle_admissible(future_), Err::Inadmissible, "future cycle inadmissible");
    require(core_.admissible(g), Err::Inadmissible, "core word inadmissible");
    // junctions
    if (core_.size() > 0) {
        require(g.edge(past_.back(), core_.symbols.front()), Err::Inadmissible,
                "past cycle does not connect to core");
        require(g.edge(core_.symbols.back(), future_.front()), Err::Inadmissible,
                "core does not connect to future cycle");
    } else {
        require(g.edge(past_.back(), future_.front()), Err::Inadmissible,
                "past cycle does not connect to future cycle");
    }
}

Point Point::through(const Graph& g, const Word& w) {
    require(w.size() > 0, Err::BadWord, "empty word");
    require(w.admissible(g), Err::Inadmissible, "inadmissible word");
    auto [pcyc, ppath] = g.canonical_past(w.symbols.front());
    auto [fpath, fcyc] = g.canonical_future(w.symbols.back());
    std::vector<Vertex> core;
    core.insert(core.end(), ppath.begin(), ppath.end());
    core.insert(core.end(), w.symbols.begin(), w.symbols.end());
    core.insert(core.end(), fpath.begin(), fpath.end());
    return Point(g, pcyc, Word(std::move(core), w.anchor - static_cast<long>(ppath.size())), fcyc);
}

Point Point::periodic(const Graph& g, std::vector<Vertex> cycle) {
    require(!cycle.empty(), Err::BadWord, "empty cycle");
    Word core({cycle.front()}, 0);
    std::vector<Vertex> fut = cycle;
    std::rotate(fut.begin(), fut.begin() + 1, fut.end()); // starts after cycle[0]
    return Point(g, std::move(cycle), std::move(core), std::move(fut));
}

Vertex Point::at(long i) const {
    if (i < core_.lo()) return past_[mod(i - core_.lo(), static_cast<long>(past_.size()))];
    if (i >= core_.hi()) return future_[mod(i - core_.hi(), static_cast<long>(future_.size()))];
    return core_.at(i);
}

Point Point::shifted(long n) const {
    Point p = *this;
    p.core_.anchor -= n;
    return p;
}

Point Point::materialized(long lo, long hi) const {
    long new_lo = std::min(lo, core_.lo());
    long new_hi = std::max(hi, core_.hi());
    if (new_hi <= new_lo) new_hi = new_lo + 1;
    std::vector<Vertex> syms;
    syms.reserve(static_cast<std::size_t>(new_hi - new_lo));
    for (long i = new_lo; i < new_hi; ++i) syms.push_back(at(i));
    // realign cycles so they wrap correctly at the new core boundaries
    std::vector<Vertex> p(past_.size()), f(future_.size());
    const long kp = static_cast<long>(past_.size()), kf = static_cast<long>(future_.size());
    for (long j = 0; j < kp; ++j) p[static_cast<std::size_t>(j)] = at(new_lo - kp + j);
    for (long j = 0; j < kf; ++j) f[static_cast<std::size_t>(j)] = at(new_hi + j);
    return Point(g_, std::move(p), Word(std::move(syms), new_lo), std::move(f));
}

Word Point::window(long lo, long hi) const {
    std::vector<Vertex> syms;
    for (long i = lo; i < hi; ++i) syms.push_back(at(i));
    return Word(std::move(syms), lo);
}

long Point::comparison_radius(const Point& other) const {
    const long a = std::min(core_lo(), other.core_lo());
    const long b = std::max(core_hi(), other.core_hi());
    const long back = static_cast<long>(past_.size() + other.past_.size());
    const long fwd = static_cast<long>(future_.size() + other.future_.size());
    return std::max(std::abs(a - back), std::abs(b + fwd)) + 1;
}

bool Point::same_point(const Point& other) const {
    // Fine-Wilf: left tails with periods p,q agreeing on p+q coordinates
    // inside the periodic zone agree everywhere; same on the right.
    const long R = comparison_radius(other);
    for (long i = -R; i <= R; ++i)
        if (at(i) != other.at(i)) return false;
    return true;
}

std::optional<long> first_disagreement(const Point& x, const Point& y) {
    const long R = x.comparison_radius(y);
    for (long n = 0; n <= R; ++n) {
        if (x.at(n) != y.at(n)) return n;
        if (n > 0 && x.at(-n) != y.at(-n)) return -n;
    }
    return std::nullopt;
}

double metric_d(const Point& x, const Point& y) {
    const auto n = first_disagreement(x, y);
    if (!n) return 0.0;
    return std::exp(-static_cast<double>(std::abs(*n)));
}

Point smale_bracket(const Point& x, const Point& y) {
    require(x.at(0) == y.at(0), Err::MismatchedZero, "Smale bracket needs x_0 = y_0");
    Point xm = x.materialized(std::min(x.core_lo(), 0L), std::max(x.core_hi(), 1L));
    Point ym = y.materialized(std::min(y.core_lo(), 0L), std::max(y.core_hi(), 1L));
    std::vector<Vertex> syms;
    for (long i = xm.core_lo(); i <= 0; ++i) syms.push_back(xm.at(i));
    for (long i = 1; i < ym.core_hi(); ++i) syms.push_back(ym.at(i));
    return Point(x.graph(), xm.past_cycle(), Word(std::move(syms), xm.core_lo()),
                 ym.future_cycle());
}

} // namespace mflow
