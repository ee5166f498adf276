import numpy as np


def make_generator(seed: int, *streams: int) -> np.random.Generator:
    """
    Возвращает генератор на счётчиковом Philox, ключ которого задаётся парой
    (seed, streams). Один и тот же ключ даёт одну и ту же последовательность
    в любом потоке и процессе.

    Аргументы:
        - seed (int): основное зерно эксперимента.
        - streams (int): номера подпотоков (например, индекс старта).
    """
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence([seed, *streams]))
    )
