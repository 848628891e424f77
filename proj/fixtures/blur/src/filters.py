import math


def gaussian_kernel_1d(size, sigma):
    """Returns a normalized one-dimensional gaussian kernel of the given size. The kernel is centred on
    the middle tap and its weights sum to one."""
    centre = size // 2
    weights = [math.exp(-((i - centre) ** 2) / (2.0 * sigma * sigma)) for i in range(size)]
    total = sum(weights)
    return [w / total for w in weights]


def convolve_rows(image, kernel):
    """Convolves every row of a two-dimensional list with the kernel, clamping reads at the borders so
    that the output has exactly the same shape as the input."""
    half = len(kernel) // 2
    out = []
    for row in image:
        width = len(row)
        new_row = []
        for x in range(width):
            acc = 0.0
            for k, w in enumerate(kernel):
                xx = min(max(x + k - half, 0), width - 1)
                acc += w * row[xx]
            new_row.append(acc)
        out.append(new_row)
    return out


def transpose(image):
    return [list(col) for col in zip(*image)]


def separable_blur(image, kernel_size=9, sigma=2.0):
    """Blurs a grayscale image given as a list of rows with a separable gaussian filter. The kernel size
    must be odd so that the filter has a centre tap; a size of about four times sigma is a good choice."""
    kernel = gaussian_kernel_1d(kernel_size, sigma)
    rows = convolve_rows(image, kernel)
    return transpose(convolve_rows(transpose(rows), kernel))
