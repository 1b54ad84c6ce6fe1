"""What each augmentation actually does to a signal.

A 440 Hz tone makes the effects measurable: added noise changes RMS but not
the tone, time stretch changes duration but not pitch, and pitch shift does
the opposite. Everything is seeded, so rerunning reproduces the same bytes.
"""

import os

import numpy as np

from emorec.audio_io import AudioClip, write_wav
from emorec.augment import add_noise, pitch_shift, time_stretch

out_dir = os.path.join("demo_out", "02")
os.makedirs(out_dir, exist_ok=True)

RATE = 16000
t = np.arange(RATE) / RATE
clip = AudioClip(0.7 * np.sin(2 * np.pi * 440.0 * t), RATE)


def dominant_hz(c):
    mag = np.abs(np.fft.rfft(c.samples * np.hanning(c.samples.shape[0])))
    return np.argmax(mag) * c.sample_rate_hz / c.samples.shape[0]


def describe(name, c):
    seconds = c.samples.shape[0] / c.sample_rate_hz
    rms = float(np.sqrt(np.mean(c.samples**2)))
    print(f"  {name:<22} {seconds:6.3f} s   rms {rms:.4f}   peak {dominant_hz(c):7.1f} Hz")
    write_wav(os.path.join(out_dir, name + ".wav"), c)


print("one second of 440 Hz, then each transform:")
describe("original", clip)

noisy = add_noise(clip, rate=0.035, seed=0)
describe("noise_0.035_seed0", noisy)
again = add_noise(clip, rate=0.035, seed=0)
print(f"  same seed, same noise: {np.array_equal(noisy.samples, again.samples)}")

describe("stretch_0.8_slower", time_stretch(clip, 0.8))
describe("stretch_1.2_faster", time_stretch(clip, 1.2))

describe("pitch_down_2_semi", pitch_shift(clip, -2.0))
describe("pitch_up_12_semi", pitch_shift(clip, 12.0))

print(f"\nwavs written under {out_dir}/ — listen to them side by side")
