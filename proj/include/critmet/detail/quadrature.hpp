#pragma once

namespace critmet {

namespace detail {
// Positive abscissae and weights of the 8-point Gauss-Legendre rule on [-1, 1].
inline constexpr double kGL8x[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                    0.9602898564975363};
inline constexpr double kGL8w[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                    0.1012285362903763};
}  // namespace detail

template <class F>
double gauss_legendre8(F f, double a, double b)
{
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double sum = 0.0;
    for (int i = 0; i < 4; ++i)
        sum += detail::kGL8w[i] * (f(c - h * detail::kGL8x[i]) + f(c + h * detail::kGL8x[i]));
    return sum * h;
}

}  // namespace critmet
