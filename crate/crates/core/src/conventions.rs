//! Index and sign conventions used throughout the crate.
//!
//! Everything here is pinned by two facts: the unit sphere has sectional
//! curvature `+1`, and `G(v, w, w, v) > 0` for independent `v, w`.
//!
//! * Storage: curvature tensors are fully covariant, in the coordinate basis,
//!   row-major in slot order. Frame changes only happen in
//!   [`planes`](crate::planes) and the classifier.
//! * Christoffel symbols: `Γ^k_ij = ½ g^{kl} (∂_i g_jl + ∂_j g_il − ∂_l g_ij)`,
//!   stored as `gamma[k][i][j]`.
//! * Curvature operator: `R(X, Y) = ∇_X∇_Y − ∇_Y∇_X − ∇_[X,Y]`, so
//!   `R(∂_i, ∂_j)∂_k = R^l_{kij} ∂_l` with
//!   `R^l_{kij} = ∂_iΓ^l_{jk} − ∂_jΓ^l_{ik} + Γ^l_{im}Γ^m_{jk} − Γ^l_{jm}Γ^m_{ik}`.
//! * `(0,4)` tensor: `R(X, Y, V, W) = g(R(X, Y)V, W)`, i.e.
//!   `R_{ijkl} = g_{lm} R^m_{kij}`.
//! * Metrical endomorphism `(X ∧ Y)V = g(Y, V)X − g(X, V)Y` and
//!   `G(X, Y, V, W) = g((X ∧ Y)V, W)`, i.e. `G_{ijkl} = g_il g_jk − g_ik g_jl`.
//! * Sectional curvature `K(v ∧ w) = R(v, w, w, v) / G(v, w, w, v)`; on the
//!   unit sphere `R = G`.
//! * Ricci: `S(X, Y) = Σ_t R(X, E_t, E_t, Y)`, i.e. `S_ij = g^{ab} R_{iabj}`;
//!   `τ = g^{ij} S_ij`; the `(1,1)` form is `S^i_j = g^{ik} S_kj`.
//! * Weyl: `C = R − {g⊙S}/(n−2) + τ G/((n−1)(n−2))` where
//!   `{g⊙S}_{abcd} = g_ad S_bc − g_ac S_bd + g_bc S_ad − g_bd S_ac`. The scalar
//!   term uses `τ/((n−1)(n−2))` everywhere; this is what makes `C` trace-free
//!   and what the sectional identity
//!   `K_C = K − (ρ(X) + ρ(Y))/(n−2) + τ/((n−1)(n−2))` requires.
//! * Derivations: for an operator-valued pair `Q(X, Y)` (the curvature
//!   operator or `X ∧ Y`) acting on a `(0,k)` tensor `T`,
//!   `(Q·T)(V_1, …, V_k; X, Y) = −Σ_s T(V_1, …, Q(X, Y)V_s, …, V_k)`.
//!   The two appended slots come last. `R·R`, `∧g·R` (Tachibana), `R·S` and
//!   `∧g·S` all use this template.
//! * Double sectional curvature for `π₁ = x ∧ y`, `π₂ = v ∧ w`:
//!   `L = (R·R)(v, w, w, v; x, y) / (∧g·R)(v, w, w, v; x, y)`.
//!
//! With these signs the solvable model geometry
//! `e^{2z}dx² + e^{−2z}dy² + dz²` has `R·R = −(∧g·R)`.
