#include "risitl/compile.hpp"

#include <stdexcept>

namespace risitl {

namespace {

struct Piece {
    bool is_expr = true;
    BoolExpr expr;
    int out = -1;  // wire id when machine-backed

    BoolExpr as_expr() const { return is_expr ? expr : BoolExpr::var(out); }
};

struct Compiler {
    int next_wire;
    std::vector<TimedSignalTransducer> parts;

    explicit Compiler(int num_props) : next_wire(num_props) {}

    int fresh() { return next_wire++; }

    int emit(GadgetOp op, GadgetParams p) {
        p.output_var = fresh();
        parts.push_back(gadget_tst(op, p));
        return p.output_var;
    }

    Piece wire_piece(int w) {
        Piece p;
        p.is_expr = false;
        p.out = w;
        return p;
    }

    Piece compile(const Formula::Ptr& f) {
        switch (f->kind) {
            case FormulaKind::True: {
                Piece p;
                p.expr = BoolExpr::tru();
                return p;
            }
            case FormulaKind::Atom: {
                Piece p;
                p.expr = BoolExpr::var(f->atom);
                return p;
            }
            case FormulaKind::Not: {
                Piece c = compile(f->lhs);
                Piece r;
                r.expr = BoolExpr::negate(c.as_expr());
                return r;  // stays an expression; wires are variables too
            }
            case FormulaKind::And: {
                Piece a = compile(f->lhs);
                Piece b = compile(f->rhs);
                Piece r;
                r.expr = BoolExpr::conj(a.as_expr(), b.as_expr());
                return r;
            }
            case FormulaKind::Or: {
                Piece a = compile(f->lhs);
                Piece b = compile(f->rhs);
                Piece r;
                r.expr = BoolExpr::disj(a.as_expr(), b.as_expr());
                return r;
            }
            case FormulaKind::Until:
                return compile_until(f);
            case FormulaKind::Eventually:
                return compile(Formula::mk_until(f->interval, Formula::mk_true(), f->lhs));
            case FormulaKind::Always:
                return compile(Formula::mk_not(Formula::mk_until(
                    f->interval, Formula::mk_true(), Formula::mk_not(f->lhs))));
            case FormulaKind::Periodic: {
                Piece body = compile(f->lhs);
                GadgetParams gp;
                gp.inputs = {body.as_expr()};
                gp.start = f->period_start;
                gp.bound = f->period;
                return wire_piece(emit(GadgetOp::PeriodicCheck, gp));
            }
        }
        throw std::logic_error("compile: unknown node");
    }

    Piece compile_until(const Formula::Ptr& f) {
        const FormulaInterval& I = f->interval;
        Piece lhs = compile(f->lhs);
        Piece rhs = compile(f->rhs);
        const bool left_true = lhs.is_expr && lhs.expr.is_true();
        BoolExpr el = lhs.as_expr();
        BoolExpr er = rhs.as_expr();

        auto unsupported = [&]() {
            return std::logic_error("compile: unsupported until interval shape " + I.str());
        };

        auto mk_until_core = [&]() {
            GadgetParams gp;
            gp.inputs = left_true ? std::vector<BoolExpr>{er} : std::vector<BoolExpr>{el, er};
            return emit(left_true ? GadgetOp::EventuallyUnbounded : GadgetOp::UntilUnbounded, gp);
        };

        if (I.unbounded) {
            if (!I.lo.is_zero()) throw unsupported();
            int wu = mk_until_core();
            Piece r;
            if (I.lo_closed) {
                // phi1 U[0,inf) phi2 = phi2 or (phi1 U(0,inf) phi2)
                r.expr = BoolExpr::disj(er, BoolExpr::var(wu));
            } else {
                r.expr = BoolExpr::var(wu);
            }
            return r;
        }

        if (I.lo.is_zero()) {
            GadgetOp op;
            if (!I.lo_closed && !I.hi_closed) op = GadgetOp::EventuallyBounded;
            else if (I.lo_closed && I.hi_closed) op = GadgetOp::EventuallyBoundedClosed;
            else throw unsupported();
            GadgetParams gf;
            gf.inputs = {er};
            gf.bound = I.hi;
            int wf = emit(op, gf);
            if (left_true) return wire_piece(wf);
            int wu = mk_until_core();
            Piece r;
            if (I.lo_closed) {
                // phi1 U[0,b] phi2 = (phi2 or U(0,inf)) and F[0,b] phi2
                r.expr = BoolExpr::conj(BoolExpr::disj(er, BoolExpr::var(wu)), BoolExpr::var(wf));
            } else {
                // phi1 U(0,b) phi2 = U(0,inf) and F(0,b) phi2
                r.expr = BoolExpr::conj(BoolExpr::var(wu), BoolExpr::var(wf));
            }
            return r;
        }

        // [a,b] with a > 0: a pure delay of the closed bounded eventually;
        // only the eventually/always shape (left argument True) is supported.
        // The pair is fused via io_compose so the wire consistency prunes
        // the joint state space.
        if (!I.lo_closed || !I.hi_closed || !left_true) throw unsupported();
        Rational c = I.hi - I.lo;
        GadgetParams gf;
        gf.inputs = {er};
        gf.bound = c;
        gf.output_var = fresh();
        auto inner = gadget_tst(GadgetOp::EventuallyBoundedClosed, gf);
        GadgetParams gd;
        gd.inputs = {BoolExpr::var(gf.output_var)};
        gd.bound = I.lo;
        gd.min_input_dwell = c;
        // rises and falls of the inner output are each spaced at least c
        // apart, so at most ceil(a/c) of each can be pending at once
        long ratio_ceil = -((-(I.lo / c)).floor());
        gd.pending_slots = static_cast<int>(2 * std::max(ratio_ceil, 1L));
        gd.output_var = fresh();
        auto shifted = gadget_tst(GadgetOp::Delay, gd);
        parts.push_back(io_compose(inner, shifted, /*reachable_only=*/true));
        return wire_piece(gd.output_var);
    }
};

}  // namespace

TstNetwork compile_mitl_network(const MitlFormula& mf) {
    Compiler c(mf.num_props);
    Piece p = c.compile(mf.root);
    // top-level wrapper gives the network a designated literal output
    GadgetParams gp;
    gp.inputs = {p.as_expr(), BoolExpr::tru()};
    int top = c.emit(GadgetOp::And, gp);
    TstNetwork net;
    net.parts = std::move(c.parts);
    net.num_props = mf.num_props;
    net.top_output = top;
    net.check_well_formed();
    return net;
}

TimedSignalTransducer compile_mitl(const MitlFormula& mf) {
    return compile_mitl_network(mf).materialize();
}

std::function<std::string(int)> var_namer(const MitlFormula& mf, const PredicateTable* table) {
    int np = mf.num_props;
    std::vector<std::string> names;
    for (int i = 0; i < np; ++i) {
        int pred = mf.prop_to_pred[static_cast<size_t>(i)];
        names.push_back(table ? table->at(pred).name : "p" + std::to_string(pred));
    }
    return [names, np](int v) {
        if (v >= 0 && v < np) return names[static_cast<size_t>(v)];
        return std::string("w") + std::to_string(v);
    };
}

}  // namespace risitl
