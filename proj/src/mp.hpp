#pragma once

#include <mpfr.h>

namespace merlang::detail {

class Mp {
public:
    explicit Mp(mpfr_prec_t prec) { mpfr_init2(v_, prec); }
    ~Mp() { mpfr_clear(v_); }
    Mp(const Mp&) = delete;
    Mp& operator=(const Mp&) = delete;
    mpfr_ptr get() { return v_; }

private:
    mpfr_t v_;
};

}  // namespace merlang::detail
