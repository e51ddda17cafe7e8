#!/usr/bin/env python3
"""Regenerates the committed MFCC oracle fixtures in this directory.

The reference MFCC chain below reproduces the canonical analysis pipeline
(22050 Hz, n_fft 2048, hop 512, centered reflect padding, periodic Hann,
Slaney-scale mel filterbank with slaney area normalization, power->dB with
1e-10 floor and 80 dB clip relative to the matrix max, orthonormal DCT-II)
using only numpy + scipy, so fixtures can be rebuilt anywhere.

Each test signal is quantized to 16-bit PCM first and the reference is
computed on the dequantized samples, so a consumer that decodes the WAV
sees bit-identical input.

Run from anywhere:  python3 tests/data/generate_fixtures.py
"""

import pathlib
import struct
import wave

import numpy as np
from scipy.fftpack import dct

HERE = pathlib.Path(__file__).resolve().parent

SR = 22050
N_FFT = 2048
HOP = 512
N_MELS = 40
N_MFCC = 13


# --------------------------------------------------------------- reference

def hz_to_mel(hz):
    """Slaney scale: linear below 1 kHz, logarithmic above."""
    hz = np.asanyarray(hz, dtype=float)
    f_sp = 200.0 / 3.0
    mels = hz / f_sp
    min_log_hz = 1000.0
    min_log_mel = min_log_hz / f_sp
    logstep = np.log(6.4) / 27.0
    log_part = hz > min_log_hz
    mels = np.where(log_part, min_log_mel + np.log(np.maximum(hz, 1e-30) / min_log_hz) / logstep, mels)
    return mels


def mel_to_hz(mel):
    mel = np.asanyarray(mel, dtype=float)
    f_sp = 200.0 / 3.0
    hz = mel * f_sp
    min_log_hz = 1000.0
    min_log_mel = min_log_hz / f_sp
    logstep = np.log(6.4) / 27.0
    log_part = mel > min_log_mel
    return np.where(log_part, min_log_hz * np.exp(logstep * (mel - min_log_mel)), hz)


def mel_filterbank(sr=SR, n_fft=N_FFT, n_mels=N_MELS, fmin=0.0, fmax=None):
    if fmax is None:
        fmax = sr / 2.0
    fftfreqs = np.linspace(0.0, sr / 2.0, 1 + n_fft // 2)
    mel_pts = np.linspace(hz_to_mel(fmin), hz_to_mel(fmax), n_mels + 2)
    mel_f = mel_to_hz(mel_pts)
    fdiff = np.diff(mel_f)
    ramps = np.subtract.outer(mel_f, fftfreqs)
    weights = np.zeros((n_mels, len(fftfreqs)))
    for i in range(n_mels):
        lower = -ramps[i] / fdiff[i]
        upper = ramps[i + 2] / fdiff[i + 1]
        weights[i] = np.maximum(0.0, np.minimum(lower, upper))
    enorm = 2.0 / (mel_f[2 : n_mels + 2] - mel_f[:n_mels])
    weights *= enorm[:, np.newaxis]
    return weights


def stft_power(x, n_fft=N_FFT, hop=HOP):
    window = 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n_fft) / n_fft)  # periodic Hann
    pad = n_fft // 2
    x = np.pad(x, pad, mode="reflect")
    n_frames = 1 + (len(x) - n_fft) // hop
    frames = np.stack([x[t * hop : t * hop + n_fft] * window for t in range(n_frames)])
    spec = np.fft.rfft(frames, axis=1)
    return np.abs(spec) ** 2  # (frames, 1 + n_fft//2)


def power_to_db(s, amin=1e-10, top_db=80.0):
    log_spec = 10.0 * np.log10(np.maximum(amin, s))
    return np.maximum(log_spec, log_spec.max() - top_db)


def mfcc(x):
    power = stft_power(x)  # (frames, bins)
    mel = power @ mel_filterbank().T  # (frames, n_mels)
    db = power_to_db(mel)
    return dct(db, type=2, axis=1, norm="ortho")[:, :N_MFCC]  # (frames, n_mfcc)


# ------------------------------------------------------------------- files

def write_wav(path, x):
    pcm = np.clip(np.round(x * 32768.0), -32768, 32767).astype(np.int16)
    with wave.open(str(path), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(SR)
        w.writeframes(pcm.tobytes())
    return pcm.astype(np.float64) / 32768.0  # what a decoder reconstructs


def write_fixture(path, m):
    m = np.ascontiguousarray(m, dtype="<f8")
    with open(path, "wb") as f:
        f.write(f"MFCC-FIXTURE v1 {m.shape[0]} {m.shape[1]}\n".encode())
        f.write(m.tobytes())


# ----------------------------------------------------------------- signals

def main():
    t = np.arange(SR) / SR  # 1 second

    signals = {}
    signals["sine_440"] = 0.5 * np.sin(2.0 * np.pi * 440.0 * t)

    rng = np.random.default_rng(1234)
    signals["noise_white"] = 0.6 * (2.0 * rng.random(SR) - 1.0)

    # 100 Hz -> 8 kHz linear sweep over one second.
    f0, f1 = 100.0, 8000.0
    phase = 2.0 * np.pi * (f0 * t + 0.5 * (f1 - f0) / 1.0 * t * t)
    signals["chirp_linear"] = 0.6 * np.sin(phase)

    # 551 samples = one 25 ms segment of a 1 s clip cut into 40 pieces.
    t_short = np.arange(551) / SR
    signals["short_551"] = 0.5 * np.sin(2.0 * np.pi * 200.0 * t_short)

    for name, x in signals.items():
        decoded = write_wav(HERE / f"{name}.wav", x)
        m = mfcc(decoded)
        write_fixture(HERE / f"{name}.mfccfix", m)
        print(f"{name}: wav {len(x)} samples, mfcc {m.shape}")

    fb = mel_filterbank()
    write_fixture(HERE / "mel_filterbank.mfccfix", fb)
    print(f"mel_filterbank: {fb.shape}")


if __name__ == "__main__":
    main()
