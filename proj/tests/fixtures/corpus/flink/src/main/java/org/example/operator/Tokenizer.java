package org.example.operator;

import org.apache.flink.api.common.functions.FlatMapFunction;
import org.apache.flink.api.java.tuple.Tuple2;
import org.apache.flink.util.Collector;

/** Splits a line on whitespace, lowercases, and drops words shorter than three characters. */
public class Tokenizer implements FlatMapFunction<String, Tuple2<String, Integer>> {
    @Override
    public void flatMap(String line, Collector<Tuple2<String, Integer>> out) {
        for (String word : line.toLowerCase().split("\\s+")) {
            if (word.length() >= 3) {
                out.collect(Tuple2.of(word, 1));
            }
        }
    }
}
