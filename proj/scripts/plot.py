#!/usr/bin/env python3
"""Reference plots for the CSV data products written by `crosskerr run`.

Usage:
    plot.py chevron    runs/chevron/chevron.csv
    plot.py sweep      runs/crosskerr_sweep/crosskerr_sweep.csv
    plot.py gates      runs/repeated_gates/repeated_gates.csv
    plot.py parity     runs/parity_check/parity_check.csv
    plot.py bars       runs/bell/pauli_bars.csv
"""

import csv
import sys

import matplotlib.pyplot as plt
import numpy as np


def read_csv(path):
    with open(path) as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = np.array([[float(x) if i > 0 or x[0] not in "IXYZ" else np.nan
                          for i, x in enumerate(row)] if row[0][0] in "-0123456789."
                         else row for row in reader], dtype=object)
    return header, rows


def plot_chevron(path):
    data = np.genfromtxt(path, delimiter=",", names=True)
    deltas = np.unique(data["delta_MHz"])
    times = np.unique(data["t_us"])
    grid = data["p_coupler_e"].reshape(len(deltas), len(times))
    plt.pcolormesh(times, deltas, grid, shading="auto", cmap="viridis")
    plt.xlabel("drive duration (us)")
    plt.ylabel("detuning (MHz)")
    plt.colorbar(label="coupler excited population")
    plt.title("coherent exchange chevron")


def plot_sweep(path):
    data = np.genfromtxt(path, delimiter=",", names=True)
    good = data["flags"] == 0
    plt.semilogy(data["delta_MHz"][good], np.abs(data["g_ab_kHz"][good]), "o-")
    if (~good).any():
        plt.plot(data["delta_MHz"][~good],
                 np.full((~good).sum(), np.nanmin(np.abs(data["g_ab_kHz"]))),
                 "rx", label="flagged")
        plt.legend()
    plt.xlabel("effective detuning (MHz)")
    plt.ylabel("|g_ab| (kHz)")
    plt.title("engineered cross-Kerr vs detuning")


def plot_gates(path):
    data = np.genfromtxt(path, delimiter=",", names=True)
    plt.plot(data["n_gates"], data["fidelity"], "s-")
    plt.xlabel("applied gates")
    plt.ylabel("state fidelity")
    plt.ylim(0, 1.02)
    plt.title("repeated controlled-phase applications")


def plot_parity(path):
    data = np.genfromtxt(path, delimiter=",", names=True)
    fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True)
    ax1.plot(data["delay_us"], data["p_odd"], "o-")
    ax1.set_ylabel("P(odd)")
    ax2.plot(data["delay_us"], data["p2_unconditioned"], "o-",
             label="unconditioned")
    ax2.plot(data["delay_us"], data["p2_post_selected"], "s-",
             label="post-selected")
    ax2.set_xlabel("delay (us)")
    ax2.set_ylabel("two-photon population")
    ax2.legend()
    fig.suptitle("bosonic parity check")


def plot_bars(path):
    labels, values = [], []
    with open(path) as fh:
        reader = csv.reader(fh)
        next(reader)
        for label, value in reader:
            labels.append(label)
            values.append(float(value))
    plt.bar(range(len(labels)), values)
    plt.xticks(range(len(labels)), labels, rotation=45)
    plt.ylabel("expectation value")
    plt.ylim(-1.05, 1.05)
    plt.title("two-qubit Pauli decomposition")


KINDS = {
    "chevron": plot_chevron,
    "sweep": plot_sweep,
    "gates": plot_gates,
    "parity": plot_parity,
    "bars": plot_bars,
}


def main():
    if len(sys.argv) != 3 or sys.argv[1] not in KINDS:
        print(__doc__)
        return 1
    KINDS[sys.argv[1]](sys.argv[2])
    plt.tight_layout()
    plt.show()
    return 0


if __name__ == "__main__":
    sys.exit(main())
