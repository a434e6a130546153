// Copyright (c) etasynth contributors.
// SPDX-License-Identifier: Apache-2.0
#include "eta/interval.hpp"

#include "eta/errors.hpp"

namespace eta {

Interval::Interval(std::optional<Rational> lo, std::optional<Rational> hi)
    : lo_(std::move(lo)), hi_(std::move(hi)) {
    if (lo_ && hi_ && *hi_ < *lo_) {
        lo_.reset();
        hi_.reset();
        empty_ = true;
    }
}

Rational Interval::width() const {
    if (!bounded()) {
        throw PreconditionError("width of an unbounded or empty interval");
    }
    return *hi_ - *lo_;
}

bool Interval::contains(const Rational& v) const {
    if (empty_) {
        return false;
    }
    return (!lo_ || *lo_ <= v) && (!hi_ || v <= *hi_);
}

bool Interval::contains(const Interval& o) const {
    if (o.empty_) {
        return true;
    }
    if (empty_) {
        return false;
    }
    const bool lo_ok = !lo_ || (o.lo_ && *lo_ <= *o.lo_);
    const bool hi_ok = !hi_ || (o.hi_ && *o.hi_ <= *hi_);
    return lo_ok && hi_ok;
}

Interval Interval::intersect(const Interval& o) const {
    if (empty_ || o.empty_) {
        return {};
    }
    std::optional<Rational> lo = lo_;
    if (o.lo_ && (!lo || *lo < *o.lo_)) {
        lo = o.lo_;
    }
    std::optional<Rational> hi = hi_;
    if (o.hi_ && (!hi || *o.hi_ < *hi)) {
        hi = o.hi_;
    }
    return {lo, hi};
}

Interval Interval::hull(const Interval& o) const {
    if (empty_) {
        return o;
    }
    if (o.empty_) {
        return *this;
    }
    std::optional<Rational> lo;
    if (lo_ && o.lo_) {
        lo = min(*lo_, *o.lo_);
    }
    std::optional<Rational> hi;
    if (hi_ && o.hi_) {
        hi = max(*hi_, *o.hi_);
    }
    return {lo, hi};
}

std::string Interval::to_string() const {
    if (empty_) {
        return "empty";
    }
    std::string out = lo_ ? "[" + lo_->to_string() : "(-inf";
    out += "; ";
    out += hi_ ? hi_->to_string() + "]" : "+inf)";
    return out;
}

bool operator==(const Interval& a, const Interval& b) {
    if (a.empty_ || b.empty_) {
        return a.empty_ == b.empty_;
    }
    return a.lo_ == b.lo_ && a.hi_ == b.hi_;
}

} // namespace eta
