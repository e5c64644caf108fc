from minsumkd.__version__ import __version__ as toolversion


PRODUCT_NAME = "minsumkd"
MAIN_COMMAND = "minsumkd"
BANNER = f"""\b
           _                                 _  __ ____
 _ __ ___ (_)_ __  ___ _   _ _ __ ___       | |/ /|  _ \\
| '_ ` _ \\| | '_ \\/ __| | | | '_ ` _ \\ _____| ' / | | | |
| | | | | | | | | \\__ \\ |_| | | | | | |_____| . \\ | |_| |
|_| |_| |_|_|_| |_|___/\\__,_|_| |_| |_|     |_|\\_\\|____/

minsumkd version {toolversion}.
Offset min-sum decoders trained by knowledge distillation."""
