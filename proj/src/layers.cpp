#include "nertl/layers.hpp"

namespace nertl {

namespace {

double init_radius(std::size_t fan_in) { return std::sqrt(3.0 / static_cast<double>(fan_in)); }

// z = W x + U h_prev + b, then the gate nonlinearity.
Vec gate_preactivation(const Mat& w, const Mat& u, const Vec& b, const Vec& x, const Vec& h_prev) {
    Vec z = affine(w, x, b);
    const Vec uh = matvec(u, h_prev);
    add_scaled(z, uh, 1.0);
    return z;
}

}  // namespace

void EmbeddingTable::init(SeededRng& rng) {
    fill_uniform(table.data(), init_radius(dim()), rng);
}

std::vector<Vec> embedding_forward(const EmbeddingTable& emb, std::span<const int> ids) {
    std::vector<Vec> out;
    out.reserve(ids.size());
    for (int id : ids) {
        require(id >= 0 && static_cast<std::size_t>(id) < emb.vocab_size(),
                "embedding_forward: id out of range for table '" + emb.name + "'");
        Vec row(emb.dim());
        const auto src = emb.table.row(static_cast<std::size_t>(id));
        std::copy(src.begin(), src.end(), row.a.begin());
        out.push_back(std::move(row));
    }
    return out;
}

void embedding_backward(std::span<const int> ids, const std::vector<Vec>& upstream,
                        Mat& grad_table) {
    require(ids.size() == upstream.size(), "embedding_backward: ids/grads length mismatch");
    for (std::size_t t = 0; t < ids.size(); ++t) {
        const int id = ids[t];
        require(id >= 0 && static_cast<std::size_t>(id) < grad_table.rows,
                "embedding_backward: id out of range");
        require(upstream[t].size() == grad_table.cols, "embedding_backward: grad dim mismatch");
        add_scaled(grad_table.row(static_cast<std::size_t>(id)), upstream[t].data(), 1.0);
    }
}

LstmParams LstmParams::make(std::size_t in_dim, std::size_t hidden) {
    LstmParams p;
    p.w_input = Mat(hidden, in_dim);
    p.w_forget = Mat(hidden, in_dim);
    p.w_output = Mat(hidden, in_dim);
    p.w_cand = Mat(hidden, in_dim);
    p.u_input = Mat(hidden, hidden);
    p.u_forget = Mat(hidden, hidden);
    p.u_output = Mat(hidden, hidden);
    p.u_cand = Mat(hidden, hidden);
    p.b_input = Vec(hidden);
    p.b_forget = Vec(hidden);
    p.b_output = Vec(hidden);
    p.b_cand = Vec(hidden);
    return p;
}

void LstmParams::init(SeededRng& rng) {
    const double rw = init_radius(in_dim());
    const double ru = init_radius(hidden());
    fill_uniform(w_input.data(), rw, rng);
    fill_uniform(w_forget.data(), rw, rng);
    fill_uniform(w_output.data(), rw, rng);
    fill_uniform(w_cand.data(), rw, rng);
    fill_uniform(u_input.data(), ru, rng);
    fill_uniform(u_forget.data(), ru, rng);
    fill_uniform(u_output.data(), ru, rng);
    fill_uniform(u_cand.data(), ru, rng);
    std::fill(b_input.a.begin(), b_input.a.end(), 0.0);
    std::fill(b_forget.a.begin(), b_forget.a.end(), 1.0);
    std::fill(b_output.a.begin(), b_output.a.end(), 0.0);
    std::fill(b_cand.a.begin(), b_cand.a.end(), 0.0);
}

LstmStepCache lstm_step(const LstmParams& p, const Vec& x, const Vec& h_prev, const Vec& c_prev) {
    require(x.size() == p.in_dim(), "lstm_step: input dim mismatch");
    require(h_prev.size() == p.hidden() && c_prev.size() == p.hidden(),
            "lstm_step: state dim mismatch");

    LstmStepCache s;
    s.x = x;
    s.h_prev = h_prev;
    s.c_prev = c_prev;

    s.gate_input = gate_preactivation(p.w_input, p.u_input, p.b_input, x, h_prev);
    s.gate_forget = gate_preactivation(p.w_forget, p.u_forget, p.b_forget, x, h_prev);
    s.gate_output = gate_preactivation(p.w_output, p.u_output, p.b_output, x, h_prev);
    s.gate_cand = gate_preactivation(p.w_cand, p.u_cand, p.b_cand, x, h_prev);

    const std::size_t n = p.hidden();
    s.c = Vec(n);
    s.tanh_c = Vec(n);
    s.h = Vec(n);
    for (std::size_t k = 0; k < n; ++k) {
        s.gate_input[k] = sigmoid(s.gate_input[k]);
        s.gate_forget[k] = sigmoid(s.gate_forget[k]);
        s.gate_output[k] = sigmoid(s.gate_output[k]);
        s.gate_cand[k] = std::tanh(s.gate_cand[k]);
        s.c[k] = s.gate_forget[k] * c_prev[k] + s.gate_input[k] * s.gate_cand[k];
        s.tanh_c[k] = std::tanh(s.c[k]);
        s.h[k] = s.gate_output[k] * s.tanh_c[k];
    }
    check_finite(s.c.data(), "lstm_step cell state");
    return s;
}

LstmStepGrads lstm_step_backward(const LstmParams& p, const LstmStepCache& s, const Vec& dh,
                                 const Vec& dc_next, LstmParams& grads) {
    const std::size_t n = p.hidden();
    require(dh.size() == n && dc_next.size() == n, "lstm_step_backward: grad dim mismatch");

    // Pre-activation gate gradients.
    Vec dz_input(n), dz_forget(n), dz_output(n), dz_cand(n);
    LstmStepGrads out;
    out.dc_prev = Vec(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double d_out_gate = dh[k] * s.tanh_c[k];
        const double dc = dc_next[k] + dh[k] * s.gate_output[k] * tanh_deriv_from_output(s.tanh_c[k]);
        const double d_in_gate = dc * s.gate_cand[k];
        const double d_cand = dc * s.gate_input[k];
        const double d_forget = dc * s.c_prev[k];
        out.dc_prev[k] = dc * s.gate_forget[k];
        dz_input[k] = d_in_gate * sigmoid_deriv_from_output(s.gate_input[k]);
        dz_forget[k] = d_forget * sigmoid_deriv_from_output(s.gate_forget[k]);
        dz_output[k] = d_out_gate * sigmoid_deriv_from_output(s.gate_output[k]);
        dz_cand[k] = d_cand * tanh_deriv_from_output(s.gate_cand[k]);
    }

    add_outer(grads.w_input, dz_input, s.x);
    add_outer(grads.w_forget, dz_forget, s.x);
    add_outer(grads.w_output, dz_output, s.x);
    add_outer(grads.w_cand, dz_cand, s.x);
    add_outer(grads.u_input, dz_input, s.h_prev);
    add_outer(grads.u_forget, dz_forget, s.h_prev);
    add_outer(grads.u_output, dz_output, s.h_prev);
    add_outer(grads.u_cand, dz_cand, s.h_prev);
    add_scaled(grads.b_input, dz_input, 1.0);
    add_scaled(grads.b_forget, dz_forget, 1.0);
    add_scaled(grads.b_output, dz_output, 1.0);
    add_scaled(grads.b_cand, dz_cand, 1.0);

    out.dx = matvec_transposed(p.w_input, dz_input);
    add_scaled(out.dx, matvec_transposed(p.w_forget, dz_forget), 1.0);
    add_scaled(out.dx, matvec_transposed(p.w_output, dz_output), 1.0);
    add_scaled(out.dx, matvec_transposed(p.w_cand, dz_cand), 1.0);

    out.dh_prev = matvec_transposed(p.u_input, dz_input);
    add_scaled(out.dh_prev, matvec_transposed(p.u_forget, dz_forget), 1.0);
    add_scaled(out.dh_prev, matvec_transposed(p.u_output, dz_output), 1.0);
    add_scaled(out.dh_prev, matvec_transposed(p.u_cand, dz_cand), 1.0);

    return out;
}

std::vector<Vec> lstm_sequence(const LstmParams& p, const std::vector<Vec>& xs,
                               LstmSequenceCache& cache) {
    require(!xs.empty(), "lstm_sequence: empty sequence");
    cache.steps.clear();
    cache.steps.reserve(xs.size());
    Vec h(p.hidden()), c(p.hidden());
    std::vector<Vec> hs;
    hs.reserve(xs.size());
    for (const Vec& x : xs) {
        LstmStepCache s = lstm_step(p, x, h, c);
        h = s.h;
        c = s.c;
        hs.push_back(h);
        cache.steps.push_back(std::move(s));
    }
    return hs;
}

std::vector<Vec> lstm_sequence_backward(const LstmParams& p, const LstmSequenceCache& cache,
                                        const std::vector<Vec>& dh_per_step, LstmParams& grads) {
    const std::size_t len = cache.steps.size();
    require(dh_per_step.size() == len, "lstm_sequence_backward: grad length mismatch");
    const std::size_t n = p.hidden();

    std::vector<Vec> dxs(len);
    Vec dh_carry(n), dc_carry(n);
    for (std::size_t t = len; t-- > 0;) {
        Vec dh = dh_carry;
        if (dh_per_step[t].size() > 0) {
            require(dh_per_step[t].size() == n, "lstm_sequence_backward: grad dim mismatch");
            add_scaled(dh, dh_per_step[t], 1.0);
        }
        LstmStepGrads g = lstm_step_backward(p, cache.steps[t], dh, dc_carry, grads);
        dxs[t] = std::move(g.dx);
        dh_carry = std::move(g.dh_prev);
        dc_carry = std::move(g.dc_prev);
    }
    return dxs;
}

std::vector<Vec> bilstm_sequence(const LstmParams& fwd, const LstmParams& bwd,
                                 const std::vector<Vec>& xs, BiLstmMode mode, BiLstmCache& cache) {
    require(!xs.empty(), "bilstm_sequence: empty sequence");
    cache.mode = mode;
    cache.len = xs.size();

    const std::vector<Vec> h_fwd = lstm_sequence(fwd, xs, cache.fwd);

    std::vector<Vec> xs_rev(xs.rbegin(), xs.rend());
    const std::vector<Vec> h_bwd_rev = lstm_sequence(bwd, xs_rev, cache.bwd);

    const std::size_t len = xs.size();
    std::vector<Vec> out;
    if (mode == BiLstmMode::final_concat) {
        Vec v(fwd.hidden() + bwd.hidden());
        for (std::size_t k = 0; k < fwd.hidden(); ++k) v[k] = h_fwd[len - 1][k];
        for (std::size_t k = 0; k < bwd.hidden(); ++k) v[fwd.hidden() + k] = h_bwd_rev[len - 1][k];
        out.push_back(std::move(v));
    } else {
        out.reserve(len);
        for (std::size_t t = 0; t < len; ++t) {
            Vec v(fwd.hidden() + bwd.hidden());
            for (std::size_t k = 0; k < fwd.hidden(); ++k) v[k] = h_fwd[t][k];
            // h_bwd at original position t sits at reversed index len-1-t.
            for (std::size_t k = 0; k < bwd.hidden(); ++k)
                v[fwd.hidden() + k] = h_bwd_rev[len - 1 - t][k];
            out.push_back(std::move(v));
        }
    }
    return out;
}

std::vector<Vec> bilstm_sequence_backward(const LstmParams& fwd, const LstmParams& bwd,
                                          const BiLstmCache& cache, const std::vector<Vec>& dout,
                                          LstmParams& grad_fwd, LstmParams& grad_bwd) {
    const std::size_t len = cache.len;
    const std::size_t nf = fwd.hidden();
    const std::size_t nb = bwd.hidden();

    std::vector<Vec> dh_fwd(len), dh_bwd_rev(len);
    if (cache.mode == BiLstmMode::final_concat) {
        require(dout.size() == 1 && dout[0].size() == nf + nb,
                "bilstm_sequence_backward: expected one grad of dim fwd+bwd");
        Vec df(nf), db(nb);
        for (std::size_t k = 0; k < nf; ++k) df[k] = dout[0][k];
        for (std::size_t k = 0; k < nb; ++k) db[k] = dout[0][nf + k];
        dh_fwd[len - 1] = std::move(df);
        dh_bwd_rev[len - 1] = std::move(db);
    } else {
        require(dout.size() == len, "bilstm_sequence_backward: grad length mismatch");
        for (std::size_t t = 0; t < len; ++t) {
            require(dout[t].size() == nf + nb, "bilstm_sequence_backward: grad dim mismatch");
            Vec df(nf), db(nb);
            for (std::size_t k = 0; k < nf; ++k) df[k] = dout[t][k];
            for (std::size_t k = 0; k < nb; ++k) db[k] = dout[t][nf + k];
            dh_fwd[t] = std::move(df);
            dh_bwd_rev[len - 1 - t] = std::move(db);
        }
    }

    const std::vector<Vec> dxs_fwd = lstm_sequence_backward(fwd, cache.fwd, dh_fwd, grad_fwd);
    const std::vector<Vec> dxs_bwd_rev = lstm_sequence_backward(bwd, cache.bwd, dh_bwd_rev, grad_bwd);

    std::vector<Vec> dxs(len);
    for (std::size_t t = 0; t < len; ++t) {
        dxs[t] = dxs_fwd[t];
        add_scaled(dxs[t], dxs_bwd_rev[len - 1 - t], 1.0);
    }
    return dxs;
}

DenseParams DenseParams::make(std::size_t in_dim, std::size_t num_labels) {
    DenseParams p;
    p.w = Mat(num_labels, in_dim);
    p.b = Vec(num_labels);
    return p;
}

void DenseParams::init(SeededRng& rng) {
    fill_uniform(w.data(), init_radius(w.cols), rng);
    std::fill(b.a.begin(), b.a.end(), 0.0);
}

Vec dense_forward(const DenseParams& p, const Vec& h) { return affine(p.w, h, p.b); }

Vec dense_backward(const DenseParams& p, const Vec& h, const Vec& dscores, DenseParams& grads) {
    require(dscores.size() == p.w.rows, "dense_backward: grad dim mismatch");
    add_outer(grads.w, dscores, h);
    add_scaled(grads.b, dscores, 1.0);
    return matvec_transposed(p.w, dscores);
}

}  // namespace nertl
