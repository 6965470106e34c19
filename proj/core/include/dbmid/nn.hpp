#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace dbmid {

struct Tensor {
    std::string name;
    std::vector<int> shape;
    std::vector<float> v;

    size_t numel() const {
        size_t n = 1;
        for (int d : shape) n *= size_t(d);
        return n;
    }
    static Tensor zeros(std::string name, std::vector<int> shape);
};

// Planar-layout convolution primitives. All buffers are [channels][h][w],
// weights are [cout][cin][k][k] (square kernels). Output sizes follow
// oh = (ih + 2*pad - k)/stride + 1.
int conv_out_dim(int in, int k, int stride, int pad);

void conv_forward(const float* in, int cin, int ih, int iw, const float* w,
                  const float* bias, int cout, int k, int stride, int pad, float* out,
                  int oh, int ow);

// Adjoint of conv_forward with respect to its input: gathers gout back
// through the kernel onto a (th, tw) grid. Also serves as the forward pass of
// a stride-`stride` transposed convolution (pass the target output size).
void conv_backward_data(const float* gout, int cout, int oh, int ow, const float* w,
                        int cin, int k, int stride, int pad, float* gin, int th, int tw);

// Accumulates weight/bias gradients into gw/gb (callers zero them first).
void conv_backward_weights(const float* in, int cin, int ih, int iw, const float* gout,
                           int cout, int oh, int ow, int k, int stride, int pad,
                           float* gw, float* gb);

void relu_forward(float* x, size_t n);
// g *= (y > 0), where y is the forward output.
void relu_backward(const float* y, float* g, size_t n);

// Global average pooling: out[c] = mean of plane c.
void gap_forward(const float* in, int c, int h, int w, float* out);
void gap_backward(const float* gout, int c, int h, int w, float* gin);

// Fully connected y = W x + b with W stored row-major [out, in].
void dense_forward(const float* x, const float* w, const float* b, int in, int out,
                   float* y);
void dense_backward(const float* x, const float* w, const float* gy, int in, int out,
                    float* gx, float* gw, float* gb);

// Numerically stable softmax + cross-entropy against a one-hot label.
// Returns the loss; writes dL/dlogits.
double softmax_cross_entropy(const float* logits, int n, int label, float* grad);

std::array<double, 4> softmax4(const float* logits);

// Mean-squared-error loss over `n` values; writes dL/dpred scaled by
// `grad_scale` (callers use 1/batch for batch averaging).
double mse_loss(const float* pred, const float* target, size_t n, float* grad,
                double grad_scale);

// Adam optimizer over a fixed set of parameter tensors. Slot order must stay
// stable across steps; state is sized on first use.
class Adam {
  public:
    Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

    // Applies one update; params[i] and grads[i] must have matching sizes.
    void step(const std::vector<Tensor*>& params,
              const std::vector<std::vector<float>>& grads);

  private:
    double lr_, beta1_, beta2_, eps_;
    std::int64_t t_ = 0;
    std::vector<std::vector<float>> m_, v_;
};

}  // namespace dbmid
