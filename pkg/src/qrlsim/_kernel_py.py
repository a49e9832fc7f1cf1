"""Pure-Python epoch loop; mirrors ``_kernel.pyx`` operation for operation.

Both implementations must stay bit-identical: same uniform consumption,
same summation order, same comparisons.
"""
from bisect import bisect_right

CLASSICAL, GROVER, TEST = 0, 1, 2


def _cumulative(weights, ids):
    out = []
    acc = 0.0
    for i in ids:
        acc += weights[i]
        out.append(acc)
    return out


def simulate_agent(weights, rewarded_ids, other_ids, plan_k, success, q_table, lam,
                   uniforms, strategy, seq, reward, q_before, k_used, share):
    """Run one agent; fills the output arrays and returns ``(n_epochs, n_rewards)``.

    ``weights`` is updated in place. ``plan_k[j]``, ``success[j]`` and
    ``q_table[j]`` describe the round played after ``j`` rewards.
    """
    w = weights.tolist()
    rew = rewarded_ids.tolist()
    oth = other_ids.tolist()
    plan = plan_k.tolist()
    succ = success.tolist()
    qs = q_table.tolist()
    us = uniforms.tolist()
    n_rew, n_oth = len(rew), len(oth)
    cum_r = _cumulative(w, rew)
    cum_o = _cumulative(w, oth)
    total_o = cum_o[-1] if n_oth else 0.0

    m = len(us)
    e = 0
    j = 0
    out_strategy = [0] * m
    out_seq = [0] * m
    out_reward = [0] * m
    out_q = [0.0] * m
    out_k = [0] * m
    out_share = [0.0] * m

    while e < m:
        k = plan[j]
        q = qs[j]
        s = q if k == 0 else succ[j]
        need = k + 1
        if e + need > m:
            break
        u = us[e]
        if (u < s and n_rew > 0) or n_oth == 0:
            x = (u / s) * cum_r[-1]
            pos = bisect_right(cum_r, x)
            if pos >= n_rew:
                pos = n_rew - 1
            sid = rew[pos]
            r = 1
        else:
            x = ((u - s) / (1.0 - s)) * total_o
            pos = bisect_right(cum_o, x)
            if pos >= n_oth:
                pos = n_oth - 1
            sid = oth[pos]
            r = 0

        if k == 0:
            out_strategy[e] = CLASSICAL
            out_seq[e] = sid
            out_reward[e] = r
            out_q[e] = q
            out_k[e] = 0
            out_share[e] = float(r)
        else:
            part = r / (k + 1.0)
            for i in range(e, e + k):
                out_strategy[i] = GROVER
                out_seq[i] = -1
                out_reward[i] = 0
                out_q[i] = q
                out_k[i] = k
                out_share[i] = part
            t = e + k
            out_strategy[t] = TEST
            out_seq[t] = sid
            out_reward[t] = r
            out_q[t] = q
            out_k[t] = k
            out_share[t] = part

        if r:
            w[sid] += lam
            acc = cum_r[pos - 1] if pos > 0 else 0.0
            for i in range(pos, n_rew):
                acc += w[rew[i]]
                cum_r[i] = acc
            j += 1
        e += need

    weights[:] = w
    strategy[:m] = out_strategy
    seq[:m] = out_seq
    reward[:m] = out_reward
    q_before[:m] = out_q
    k_used[:m] = out_k
    share[:m] = out_share
    return e, j
