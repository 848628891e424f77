package org.example.c03;

import java.math.BigDecimal;
import java.math.RoundingMode;

public class PriceTable {
    private final double rawPrice;
    private final int quantity;

    public PriceTable(double rawPrice, int quantity) {
        this.rawPrice = rawPrice;
        this.quantity = quantity;
    }

    public BigDecimal unitPrice() {
        return new BigDecimal(rawPrice).setScale(2, RoundingMode.HALF_UP);
    }

    public BigDecimal total() {
        return unitPrice().multiply(BigDecimal.valueOf(quantity));
    }
}
