# Testing file for all the scenarios in the srm benchmark
import numpy as np

import srm_benchmark

if __name__ == '__main__':
    # list all the scenarios in the srm benchmark
    for name in srm_benchmark.list():
        # create an environment for the input named scenario
        env = srm_benchmark.make(name)
        env.seed(0)
        # draw feasible problem instances, each one is a channel realization with its rate requirements
        channels = [env.sample() for _ in range(20)]
        # the range of rate requirements the scenario draws from
        rate_range = env.rate_space.range()
        # random powers from the power box, most of them miss some rate requirement
        powers = [env.power_space.sample() for _ in range(20)]
        # the base power B^-1 q meets every requirement with equality, a safe starting point
        infos = env.info(channels)
        base = [info["p0"] for info in infos]
        # evaluate the powers with respect to the channels and returns
        # s: fraction of allocations that meet every rate requirement and the power box
        # r: mean sum rate in bit/s/Hz
        # details: a dictionary of arrays for "satisfaction", "sum_rate" and "rate_margin"
        # info: cached constraint sets of the channels, they can be passed instead of the channels
        s, r, details, infos = env.evaluate(infos, powers)
        s0, r0, _, _ = env.evaluate(infos, base)
        # Print the details about the evaluation
        print(f"Testing {name}: ", s, r)
        print("\tBase power: ", s0, r0)
        print("\tRate Range: ", rate_range)
        print("\tWorst margin: ", np.min(details["rate_margin"]))
