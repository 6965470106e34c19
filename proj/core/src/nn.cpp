#include "dbmid/nn.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstring>

#include "dbmid/errors.hpp"

namespace dbmid {

namespace {

using RowMat = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using StridedMap = Eigen::Map<RowMat, 0, Eigen::OuterStride<>>;
using ConstStridedMap = Eigen::Map<const RowMat, 0, Eigen::OuterStride<>>;

// Strip size keeps the im2col scratch near 16 MB.
int strip_pixels(size_t npix, int min_pixels, int cols) {
    const size_t budget = 4'000'000 / size_t(std::max(1, cols));
    const size_t p = std::max(size_t(min_pixels), budget);
    return int(std::min(npix, p));
}

std::vector<float>& scratch_a() {
    thread_local std::vector<float> buf;
    return buf;
}

std::vector<float>& scratch_w() {
    thread_local std::vector<float> buf;
    return buf;
}

// im2col rows for output pixels [p0, p0+count) of a conv over `in`.
// Column order (ci, ky, kx) matches the [cout][cin][k][k] weight layout.
void fill_im2col(const float* in, int cin, int ih, int iw, int k, int stride, int pad,
                 int ow, int p0, int count, float* a) {
    const int kk = k * k;
    const int cols = cin * kk;
    for (int p = 0; p < count; ++p) {
        const int pix = p0 + p;
        const int oy = pix / ow;
        const int ox = pix % ow;
        const int iy0 = oy * stride - pad;
        const int ix0 = ox * stride - pad;
        float* row = a + size_t(p) * cols;
        if (iy0 >= 0 && iy0 + k <= ih && ix0 >= 0 && ix0 + k <= iw) {
            for (int ci = 0; ci < cin; ++ci) {
                const float* src = in + (size_t(ci) * ih + iy0) * iw + ix0;
                float* dst = row + size_t(ci) * kk;
                for (int ky = 0; ky < k; ++ky) {
                    std::memcpy(dst + size_t(ky) * k, src + size_t(ky) * iw,
                                size_t(k) * sizeof(float));
                }
            }
        } else {
            std::memset(row, 0, size_t(cols) * sizeof(float));
            for (int ci = 0; ci < cin; ++ci) {
                for (int ky = 0; ky < k; ++ky) {
                    const int iy = iy0 + ky;
                    if (iy < 0 || iy >= ih) continue;
                    const float* src = in + (size_t(ci) * ih + iy) * iw;
                    float* dst = row + size_t(ci) * kk + size_t(ky) * k;
                    for (int kx = 0; kx < k; ++kx) {
                        const int ix = ix0 + kx;
                        if (ix >= 0 && ix < iw) dst[kx] = src[ix];
                    }
                }
            }
        }
    }
}

// im2col rows for the adjoint gather: target pixels [p0, p0+count) of the
// (th, tw) grid pull from gout where the strided conv geometry divides
// evenly. Column order (co, ky, kx).
void fill_im2col_adjoint(const float* gout, int cout, int oh, int ow, int k, int stride,
                         int pad, int tw, int p0, int count, float* a) {
    const int kk = k * k;
    const int cols = cout * kk;
    for (int p = 0; p < count; ++p) {
        const int pix = p0 + p;
        const int ty = pix / tw;
        const int tx = pix % tw;
        float* row = a + size_t(p) * cols;
        std::memset(row, 0, size_t(cols) * sizeof(float));
        for (int ky = 0; ky < k; ++ky) {
            const int ny = ty + pad - ky;
            if (ny < 0 || ny % stride != 0) continue;
            const int oy = ny / stride;
            if (oy >= oh) continue;
            for (int kx = 0; kx < k; ++kx) {
                const int nx = tx + pad - kx;
                if (nx < 0 || nx % stride != 0) continue;
                const int ox = nx / stride;
                if (ox >= ow) continue;
                const float* src = gout + size_t(oy) * ow + ox;
                for (int co = 0; co < cout; ++co) {
                    row[size_t(co) * kk + size_t(ky) * k + kx] = src[size_t(co) * oh * ow];
                }
            }
        }
    }
}

}  // namespace

Tensor Tensor::zeros(std::string name, std::vector<int> shape) {
    Tensor t;
    t.name = std::move(name);
    t.shape = std::move(shape);
    t.v.assign(t.numel(), 0.0f);
    return t;
}

int conv_out_dim(int in, int k, int stride, int pad) {
    return (in + 2 * pad - k) / stride + 1;
}

void conv_forward(const float* in, int cin, int ih, int iw, const float* w,
                  const float* bias, int cout, int k, int stride, int pad, float* out,
                  int oh, int ow) {
    const int cols = cin * k * k;
    const size_t npix = size_t(oh) * ow;
    const int strip = strip_pixels(npix, ow, cols);
    auto& a = scratch_a();
    a.resize(size_t(strip) * cols);
    Eigen::Map<const RowMat> wm(w, cout, cols);
    for (size_t p0 = 0; p0 < npix; p0 += size_t(strip)) {
        const int count = int(std::min(size_t(strip), npix - p0));
        fill_im2col(in, cin, ih, iw, k, stride, pad, ow, int(p0), count, a.data());
        Eigen::Map<const RowMat> am(a.data(), count, cols);
        StridedMap om(out + p0, cout, count, Eigen::OuterStride<>(Eigen::Index(npix)));
        om.noalias() = wm * am.transpose();
    }
    if (bias) {
        for (int co = 0; co < cout; ++co) {
            float* plane = out + size_t(co) * npix;
            const float b = bias[co];
            for (size_t i = 0; i < npix; ++i) plane[i] += b;
        }
    }
}

void conv_backward_data(const float* gout, int cout, int oh, int ow, const float* w,
                        int cin, int k, int stride, int pad, float* gin, int th, int tw) {
    const int kk = k * k;
    const int cols = cout * kk;
    // Reorder weights to [cin][cout][k][k] so rows line up with the adjoint
    // im2col columns.
    auto& wf = scratch_w();
    wf.resize(size_t(cin) * cols);
    for (int co = 0; co < cout; ++co) {
        for (int ci = 0; ci < cin; ++ci) {
            std::memcpy(wf.data() + (size_t(ci) * cout + co) * kk,
                        w + (size_t(co) * cin + ci) * kk, size_t(kk) * sizeof(float));
        }
    }
    const size_t npix = size_t(th) * tw;
    const int strip = strip_pixels(npix, tw, cols);
    auto& a = scratch_a();
    a.resize(size_t(strip) * cols);
    Eigen::Map<const RowMat> wm(wf.data(), cin, cols);
    for (size_t p0 = 0; p0 < npix; p0 += size_t(strip)) {
        const int count = int(std::min(size_t(strip), npix - p0));
        fill_im2col_adjoint(gout, cout, oh, ow, k, stride, pad, tw, int(p0), count,
                            a.data());
        Eigen::Map<const RowMat> am(a.data(), count, cols);
        StridedMap gm(gin + p0, cin, count, Eigen::OuterStride<>(Eigen::Index(npix)));
        gm.noalias() = wm * am.transpose();
    }
}

void conv_backward_weights(const float* in, int cin, int ih, int iw, const float* gout,
                           int cout, int oh, int ow, int k, int stride, int pad,
                           float* gw, float* gb) {
    const int cols = cin * k * k;
    const size_t npix = size_t(oh) * ow;
    const int strip = strip_pixels(npix, ow, cols);
    auto& a = scratch_a();
    a.resize(size_t(strip) * cols);
    Eigen::Map<RowMat> gwm(gw, cout, cols);
    for (size_t p0 = 0; p0 < npix; p0 += size_t(strip)) {
        const int count = int(std::min(size_t(strip), npix - p0));
        fill_im2col(in, cin, ih, iw, k, stride, pad, ow, int(p0), count, a.data());
        Eigen::Map<const RowMat> am(a.data(), count, cols);
        ConstStridedMap gm(gout + p0, cout, count, Eigen::OuterStride<>(Eigen::Index(npix)));
        gwm.noalias() += gm * am;
    }
    if (gb) {
        for (int co = 0; co < cout; ++co) {
            const float* plane = gout + size_t(co) * npix;
            double acc = 0.0;
            for (size_t i = 0; i < npix; ++i) acc += plane[i];
            gb[co] += float(acc);
        }
    }
}

void relu_forward(float* x, size_t n) {
    for (size_t i = 0; i < n; ++i) x[i] = x[i] > 0.0f ? x[i] : 0.0f;
}

void relu_backward(const float* y, float* g, size_t n) {
    for (size_t i = 0; i < n; ++i)
        if (y[i] <= 0.0f) g[i] = 0.0f;
}

void gap_forward(const float* in, int c, int h, int w, float* out) {
    const size_t npix = size_t(h) * w;
    for (int ci = 0; ci < c; ++ci) {
        double acc = 0.0;
        const float* plane = in + size_t(ci) * npix;
        for (size_t i = 0; i < npix; ++i) acc += plane[i];
        out[ci] = float(acc / double(npix));
    }
}

void gap_backward(const float* gout, int c, int h, int w, float* gin) {
    const size_t npix = size_t(h) * w;
    for (int ci = 0; ci < c; ++ci) {
        const float g = gout[ci] / float(npix);
        float* plane = gin + size_t(ci) * npix;
        for (size_t i = 0; i < npix; ++i) plane[i] = g;
    }
}

void dense_forward(const float* x, const float* w, const float* b, int in, int out,
                   float* y) {
    for (int o = 0; o < out; ++o) {
        double acc = b ? b[o] : 0.0;
        const float* row = w + size_t(o) * in;
        for (int i = 0; i < in; ++i) acc += double(row[i]) * x[i];
        y[o] = float(acc);
    }
}

void dense_backward(const float* x, const float* w, const float* gy, int in, int out,
                    float* gx, float* gw, float* gb) {
    if (gx) {
        for (int i = 0; i < in; ++i) {
            double acc = 0.0;
            for (int o = 0; o < out; ++o) acc += double(w[size_t(o) * in + i]) * gy[o];
            gx[i] = float(acc);
        }
    }
    for (int o = 0; o < out; ++o) {
        float* row = gw + size_t(o) * in;
        for (int i = 0; i < in; ++i) row[i] += gy[o] * x[i];
        if (gb) gb[o] += gy[o];
    }
}

double softmax_cross_entropy(const float* logits, int n, int label, float* grad) {
    if (label < 0 || label >= n) throw ArgumentError("label out of range");
    double mx = logits[0];
    for (int i = 1; i < n; ++i) mx = std::max(mx, double(logits[i]));
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += std::exp(double(logits[i]) - mx);
    const double loss = std::log(sum) - (double(logits[label]) - mx);
    for (int i = 0; i < n; ++i) {
        const double p = std::exp(double(logits[i]) - mx) / sum;
        grad[i] = float(p - (i == label ? 1.0 : 0.0));
    }
    return loss;
}

std::array<double, 4> softmax4(const float* logits) {
    double mx = logits[0];
    for (int i = 1; i < 4; ++i) mx = std::max(mx, double(logits[i]));
    std::array<double, 4> p{};
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) {
        p[size_t(i)] = std::exp(double(logits[i]) - mx);
        sum += p[size_t(i)];
    }
    for (double& v : p) v /= sum;
    return p;
}

double mse_loss(const float* pred, const float* target, size_t n, float* grad,
                double grad_scale) {
    double acc = 0.0;
    const double gs = 2.0 * grad_scale / double(n);
    for (size_t i = 0; i < n; ++i) {
        const double d = double(pred[i]) - double(target[i]);
        acc += d * d;
        grad[i] = float(gs * d);
    }
    return acc / double(n);
}

Adam::Adam(double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
    if (lr <= 0.0) throw ArgumentError("learning rate must be positive");
}

void Adam::step(const std::vector<Tensor*>& params,
                const std::vector<std::vector<float>>& grads) {
    if (params.size() != grads.size()) throw ArgumentError("adam: param/grad mismatch");
    if (m_.empty()) {
        m_.resize(params.size());
        v_.resize(params.size());
        for (size_t i = 0; i < params.size(); ++i) {
            m_[i].assign(params[i]->v.size(), 0.0f);
            v_[i].assign(params[i]->v.size(), 0.0f);
        }
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, double(t_));
    const double bc2 = 1.0 - std::pow(beta2_, double(t_));
    for (size_t i = 0; i < params.size(); ++i) {
        auto& p = params[i]->v;
        const auto& g = grads[i];
        if (p.size() != g.size() || p.size() != m_[i].size()) {
            throw ArgumentError("adam: tensor size changed between steps");
        }
        for (size_t j = 0; j < p.size(); ++j) {
            const double gj = g[j];
            const double m = beta1_ * m_[i][j] + (1.0 - beta1_) * gj;
            const double v = beta2_ * v_[i][j] + (1.0 - beta2_) * gj * gj;
            m_[i][j] = float(m);
            v_[i][j] = float(v);
            p[j] = float(p[j] - lr_ * (m / bc1) / (std::sqrt(v / bc2) + eps_));
        }
    }
}

}  // namespace dbmid
