"""Frame airtimes under the three PHY/MAC presets.

Walks through what the mac module computes: on-air durations of control and
data frames, how the two 802.11b overhead presets differ, and how the
overhead presets can be re-derived from a table of reported airtimes by
brute force.
"""

from wsnsim.mac import (
    DOT11B_NS2,
    DOT11B_OMNET,
    DOT154_DEFAULT,
    build_cca_exchange,
    build_rts_cts_exchange,
    compute_airtime,
    fit_frame_overhead,
    reported_airtime_us,
)

print("== 802.11b control frames (11 Mbit/s, 192 us preamble+PLCP) ==")
for label, nbytes in (("RTS", 20), ("CTS", 14), ("ACK", 14)):
    exact = compute_airtime(DOT11B_NS2, nbytes)
    print(f"  {label:>4} ({nbytes:>2} B): {exact:8.2f} us  (reported {reported_airtime_us(DOT11B_NS2, nbytes)} us)")

print("\n== 802.11b data frames: ns2-profile (55 B overhead) vs omnet-profile (65 B) ==")
print("  payload   ns2-profile   omnet-profile")
for payload in range(10, 100, 20):
    ns2 = reported_airtime_us(DOT11B_NS2, DOT11B_NS2.overhead_bytes + payload)
    omn = reported_airtime_us(DOT11B_OMNET, DOT11B_OMNET.overhead_bytes + payload)
    print(f"  {payload:>5} B   {ns2:>8} us   {omn:>10} us")

print("\n== re-deriving the overhead presets from reported airtimes ==")
payloads = [10, 30, 50, 70, 90]
for name, table in (("ns2", [239, 253, 268, 282, 297]),
                    ("omnet", [246, 261, 275, 290, 304])):
    fit = fit_frame_overhead(payloads, table)
    print(f"  {name:>5}: overhead {fit.overhead_bytes} B, {fit.rounding} rounding, "
          f"total deviation {fit.total_deviation_us} us")

print("\n== complete channel-access exchanges (payload 10 B, zero backoff) ==")
for tl in (build_rts_cts_exchange(DOT11B_NS2, 10), build_cca_exchange(DOT154_DEFAULT, 10)):
    print(f"  {tl.profile_id}: total {tl.total_us:.2f} us")
    for phase in tl.phases:
        frame = f" [{phase.frame.role.value}, {phase.frame.total_bytes} B]" if phase.frame else ""
        print(f"    {phase.kind.value:>10}: {phase.duration_us:9.2f} us{frame}")
