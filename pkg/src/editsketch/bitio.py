"""MSB-first bit stream primitives: fixed-width fields, Elias gamma, zigzag.

All prefix-free integer fields in the sketch format are Elias gamma codes of
v+1, so v = 0 occupies a single bit.
"""

from __future__ import annotations

from .errors import CorruptSketchError


class BitWriter:
    """Accumulates bits MSB-first into a bytearray."""

    def __init__(self) -> None:
        self._buf = bytearray()
        self._bitpos = 0  # bits used in the last byte, 0..7

    def __len__(self) -> int:
        return self.bit_length

    @property
    def bit_length(self) -> int:
        return len(self._buf) * 8 - (8 - self._bitpos) % 8

    def write_bit(self, bit: int) -> None:
        if self._bitpos == 0:
            self._buf.append(0)
        if bit:
            self._buf[-1] |= 0x80 >> self._bitpos
        self._bitpos = (self._bitpos + 1) % 8

    def write_uint(self, value: int, bits: int) -> None:
        if value < 0 or (bits < value.bit_length()):
            raise ValueError(f"value {value} does not fit in {bits} bits")
        for shift in range(bits - 1, -1, -1):
            self.write_bit((value >> shift) & 1)

    def write_gamma(self, value: int) -> None:
        """Elias gamma of value+1; prefix-free, 1 bit for value 0."""
        if value < 0:
            raise ValueError("gamma requires a non-negative value")
        n = value + 1
        width = n.bit_length()
        for _ in range(width - 1):
            self.write_bit(0)
        self.write_uint(n, width)

    def write_signed_gamma(self, value: int) -> None:
        self.write_gamma(zigzag(value))

    def write_bits(self, other: "BitWriter") -> None:
        """Appends another writer's bits (used to splice block payloads)."""
        self.write_bytes_bits(bytes(other._buf), other.bit_length)

    def write_bytes_bits(self, data: bytes, bit_length: int) -> None:
        if self._bitpos == 0:
            # fast path: byte-aligned destination
            full, rest = divmod(bit_length, 8)
            self._buf.extend(data[:full])
            if rest:
                self._buf.append(data[full] & (0xFF << (8 - rest)) & 0xFF)
                self._bitpos = rest
            return
        for i in range(bit_length):
            self.write_bit((data[i >> 3] >> (7 - (i & 7))) & 1)

    def align_to_byte(self) -> None:
        while self._bitpos != 0:
            self.write_bit(0)

    def getvalue(self) -> bytes:
        return bytes(self._buf)


class BitReader:
    """Reads bits MSB-first from a bytes object; raises on underflow."""

    def __init__(self, data: bytes, bit_length: int | None = None) -> None:
        self._data = data
        self._pos = 0
        self._limit = len(data) * 8 if bit_length is None else bit_length
        if self._limit > len(data) * 8:
            raise ValueError("bit_length exceeds the buffer")

    @property
    def position(self) -> int:
        return self._pos

    @property
    def remaining(self) -> int:
        return self._limit - self._pos

    def read_bit(self) -> int:
        if self._pos >= self._limit:
            raise CorruptSketchError("bit stream underflow")
        byte = self._data[self._pos >> 3]
        bit = (byte >> (7 - (self._pos & 7))) & 1
        self._pos += 1
        return bit

    def read_uint(self, bits: int) -> int:
        value = 0
        for _ in range(bits):
            value = (value << 1) | self.read_bit()
        return value

    def read_gamma(self) -> int:
        zeros = 0
        while self.read_bit() == 0:
            zeros += 1
            if zeros > 64:
                raise CorruptSketchError("gamma prefix too long")
        n = 1
        for _ in range(zeros):
            n = (n << 1) | self.read_bit()
        return n - 1

    def read_signed_gamma(self) -> int:
        return unzigzag(self.read_gamma())

    def align_to_byte(self) -> None:
        self._pos += (8 - self._pos % 8) % 8
        if self._pos > self._limit:
            raise CorruptSketchError("bit stream underflow at padding")


def zigzag(v: int) -> int:
    return 2 * v if v >= 0 else -2 * v - 1


def unzigzag(u: int) -> int:
    return u // 2 if u % 2 == 0 else -(u + 1) // 2


def gamma_bit_length(value: int) -> int:
    """Size in bits of write_gamma(value), without writing it."""
    return 2 * (value + 1).bit_length() - 1
