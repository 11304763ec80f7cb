#include "core/harness.hpp"

namespace vdf {

void run_harness_script(Env& env, ModelDriver& driver, HarnessKind kind,
                        u32 op_count) {
    int st = driver.probe(env);
    if (st != 0)
        return;  // honest probe failure: nothing to tear down
    if (kind == HarnessKind::Extended) {
        for (u32 i = 0; i < op_count; ++i) {
            u8 op = env.stream().next_u8();
            u8 plen = env.stream().next_u8() % 65;
            auto payload = env.stream().take(plen);
            driver.resource_op(env, op, payload);
        }
    }
    driver.remove(env);
}

}  // namespace vdf
